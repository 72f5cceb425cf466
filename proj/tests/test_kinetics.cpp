#include <doctest.h>

#include <cmath>

#include "batopt/errors.hpp"
#include "batopt/kinetics.hpp"

using namespace batopt;

TEST_SUITE("kinetics") {
  TEST_CASE("Arrhenius scaling examples") {
    CHECK(arrhenius(3.5, -40000.0, 298.15, 298.15) == 3.5);
    CHECK(arrhenius(3.5, 0.0, 350.0, 298.15) == 3.5);
    CHECK(arrhenius(1.0, kGasConstant, 600.0, 300.0) == doctest::Approx(std::exp(-1.0 / 600.0)).epsilon(1e-15));
    // negative activation energy increases the value with temperature
    CHECK(arrhenius(1.0, -30000.0, 318.15, 298.15) > 1.0);
  }

  TEST_CASE("exchange current vanishes at the concentration bounds") {
    CHECK(exchange_current(0.0, 30000.0, 1000.0, 2e-11, 0.5, 1.0) == 0.0);
    CHECK(exchange_current(30000.0, 30000.0, 1000.0, 2e-11, 0.5, 1.0) == 0.0);
    CHECK_THROWS_AS(exchange_current(-1.0, 30000.0, 1000.0, 2e-11, 0.5, 1.0), KineticsError);
    CHECK_THROWS_AS(exchange_current(30000.1, 30000.0, 1000.0, 2e-11, 0.5, 1.0), KineticsError);
  }

  TEST_CASE("exchange current is maximal at half filling for symmetric transfer") {
    const double cmax = 30000.0;
    double best_c = 0.0, best = -1.0;
    for (int i = 0; i <= 3000; ++i) {
      double c = cmax * i / 3000.0;
      double j = exchange_current(c, cmax, 1000.0, 2e-11, 0.5, 1.0);
      if (j > best) {
        best = j;
        best_c = c;
      }
    }
    CHECK(best_c == doctest::Approx(cmax / 2.0));
    CHECK(exchange_current(cmax / 2, cmax, 1000.0, 2e-11, 0.5, 1.0) == best);
  }

  TEST_CASE("general transfer coefficient matches the power form") {
    double j = exchange_current(12000.0, 30000.0, 1000.0, 2e-11, 0.4, 1.0);
    double ref = kFaraday * 2e-11 * std::pow(12000.0, 0.4) * std::pow(1000.0, 0.6) * std::pow(18000.0, 0.6);
    CHECK(j == doctest::Approx(ref).epsilon(1e-14));
  }

  TEST_CASE("overpotential inversion") {
    const double j0 = 2.3, T = 298.15;
    CHECK(bv_overpotential(0.0, j0, T, 0.5, 1.0) == 0.0);
    CHECK(bv_overpotential(1.0, j0, T, 0.5, 1.0) < 0.0);
    CHECK(bv_overpotential(-1.0, j0, T, 0.5, 1.0) > 0.0);
    for (double J : {-40.0, -3.0, -1e-3, 1e-3, 0.7, 5.0, 40.0}) {
      double eta = bv_overpotential(J, j0, T, 0.5, 1.0);
      CHECK(std::abs(bv_current(eta, j0, T, 0.5, 1.0) - J) <= 1e-12 * std::abs(J));
      for (double a : {0.3, 0.65}) {
        double e2 = bv_overpotential(J, j0, T, a, 1.0);
        CHECK(std::abs(bv_current(e2, j0, T, a, 1.0) - J) <= 1e-12 * j0);
      }
    }
    CHECK_THROWS_AS(bv_overpotential(1.0, 0.0, T, 0.5, 1.0), KineticsError);
  }

  TEST_CASE("current derivative matches central differences") {
    for (double eta : {-0.1, -0.01, 0.0, 0.02, 0.08}) {
      double h = 1e-7;
      double fd = (bv_current(eta + h, 1.7, 310.0, 0.45, 1.0) - bv_current(eta - h, 1.7, 310.0, 0.45, 1.0)) / (2 * h);
      CHECK(bv_current_derivative(eta, 1.7, 310.0, 0.45, 1.0) == doctest::Approx(fd).epsilon(1e-6));
    }
  }

  TEST_CASE("side reaction current limits and monotonicity") {
    SeiParams sei;
    const double T = 298.15;
    double thin = sei_current(-0.01, 0.1, 5e-9, T, sei, 1.0, T);
    double thick = sei_current(-0.01, 0.1, 5e-5, T, sei, 1.0, T);
    double thicker = sei_current(-0.01, 0.1, 5e-1, T, sei, 1.0, T);
    CHECK(thin > 0.0);
    CHECK(thick < thin);
    CHECK(thicker < 1e-3 * thick);
    CHECK(sei_current(-0.05, 0.1, 5e-9, T, sei, 1.0, T) > thin);
    CHECK(sei_current(0.05, 0.1, 5e-9, T, sei, 1.0, T) < thin);
    CHECK_THROWS_AS(sei_current(-0.01, 0.1, 0.0, T, sei, 1.0, T), DomainError);
  }

  TEST_CASE("doubling the transport coefficient doubles a transport-limited current") {
    SeiParams sei;
    const double T = 298.15, ocv = 0.1, delta = 1e-6;
    const double rt = kGasConstant * T;
    double kinetic = 1.0 / (kFaraday * sei.rate_ref * std::exp(-kFaraday / rt * (ocv - kSeiReferencePotential)));
    double diffusive = delta / (kFaraday * sei.diffusivity_ref);
    REQUIRE(diffusive >= 20.0 * kinetic);
    double base = sei_current(-0.01, ocv, delta, T, sei, 1.0, T);
    sei.diffusivity_ref *= 2.0;
    double doubled = sei_current(-0.01, ocv, delta, T, sei, 1.0, T);
    CHECK(doubled / base == doctest::Approx(2.0).epsilon(0.05));
  }
}
