#include <doctest.h>

#include <cmath>

#include "batopt/chebyshev.hpp"
#include "batopt/errors.hpp"
#include "oracles.hpp"

using namespace batopt;

namespace {

struct RelaxRun {
  double worst_rest = 0.0;
  double worst_flux = 0.0;
  double mean_error = 0.0;
};

// Constant flux for `flux_s`, then rest for `rest_s`; 5-node collocation against the FV oracle.
RelaxRun relaxation(double radius, double diffusivity, double c0, double j_in, double flux_s,
                    double rest_s) {
  ChebDisc disc = cheb_disc(5, radius);
  Eigen::VectorXd c = Eigen::VectorXd::Constant(5, c0);
  oracle::FdSphere fd(200, radius, diffusivity, c0);
  auto f = [&](const Eigen::VectorXd& x, double j) -> Eigen::VectorXd {
    return diffusivity * disc.laplacian * x + disc.flux_gain * j;
  };
  const double dt = 0.5;
  const int n_flux = static_cast<int>(flux_s / dt), n_rest = static_cast<int>(rest_s / dt);
  RelaxRun r;
  for (int k = 0; k < n_flux + n_rest; ++k) {
    double j = k < n_flux ? j_in : 0.0;
    Eigen::VectorXd k1 = f(c, j), k2 = f(c + dt / 2 * k1, j), k3 = f(c + dt / 2 * k2, j),
                    k4 = f(c + dt * k3, j);
    c += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    fd.step(dt, j);
    double e = std::abs(disc.surface(c.data(), j, diffusivity) - fd.surface(j)) / fd.surface(j);
    (k < n_flux ? r.worst_flux : r.worst_rest) = std::max(k < n_flux ? r.worst_flux : r.worst_rest, e);
    r.mean_error = std::max(r.mean_error, std::abs(disc.mean(c.data()) - fd.mean()) / fd.mean());
  }
  return r;
}

}  // namespace

TEST_SUITE("chebyshev") {
  TEST_CASE("fewer than three nodes is a configuration error") {
    CHECK_THROWS_AS(cheb_disc(2, 1e-6), ConfigError);
    CHECK_THROWS_AS(cheb_disc(5, 0.0), ConfigError);
    CHECK_NOTHROW(cheb_disc(3, 1e-6));
  }

  TEST_CASE("derivative is exact on low-order polynomials") {
    for (int n : {3, 5, 8}) {
      ChebDisc d = cheb_disc(n, 2.0);
      Eigen::VectorXd lin = 1.5 + 0.25 * d.nodes.array();
      Eigen::VectorXd sq = d.nodes.array().square();
      Eigen::VectorXd dl = d.d1 * lin, ds = d.d1 * sq;
      for (int i = 0; i < n; ++i) {
        CHECK(dl(i) == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(ds(i) == doctest::Approx(2.0 * d.nodes(i)).epsilon(1e-12));
      }
      CHECK(d.d1.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  TEST_CASE("nodes lie inside the particle, surface side first") {
    ChebDisc d = cheb_disc(5, 5e-6);
    for (int i = 0; i < 5; ++i) {
      CHECK(d.nodes(i) > 0.0);
      CHECK(d.nodes(i) < 5e-6);
      if (i > 0) CHECK(d.nodes(i) < d.nodes(i - 1));
    }
  }

  TEST_CASE("uniform concentration without flux is an equilibrium") {
    ChebDisc d = cheb_disc(5, 5e-6);
    Eigen::VectorXd c = Eigen::VectorXd::Constant(5, 30000.0);
    Eigen::VectorXd rhs = 1e-14 * d.laplacian * c;
    double scale = 1e-14 * d.laplacian.cwiseAbs().maxCoeff() * 30000.0;
    CHECK(rhs.cwiseAbs().maxCoeff() <= 1e-10 * scale);
    CHECK(d.surface(c.data(), 0.0, 1e-14) == doctest::Approx(30000.0).epsilon(1e-12));
    CHECK(d.mean(c.data()) == doctest::Approx(30000.0).epsilon(1e-12));
  }

  TEST_CASE("surface flux changes the mean at the spherical rate") {
    const double R = 5e-6, j = 1e-5;
    ChebDisc d = cheb_disc(5, R);
    Eigen::VectorXd c = Eigen::VectorXd::Random(5).array() * 100.0 + 20000.0;
    double dmean = d.volume_weights.dot(1e-14 * d.laplacian * c + d.flux_gain * j);
    CHECK(dmean == doctest::Approx(3.0 * j / R).epsilon(1e-9));
  }

  TEST_CASE("relaxation matches a fine finite-volume solution within 0.5 percent") {
    // 1C-like insertion into a 5 um particle for 10 min, then 10 min of rest
    RelaxRun r = relaxation(5e-6, 1e-14, 25000.0, 1.49e-5, 600.0, 600.0);
    CHECK(r.worst_rest < 5e-3);
    CHECK(r.worst_flux < 5e-3);
    CHECK(r.mean_error < 1e-9);
  }

  TEST_CASE("relaxation after 1C extraction from the negative particle") {
    RelaxRun r = relaxation(8e-6, 3e-14, 15000.0, -2.7 / (96485.33212 * 1.6553822846742645), 600.0,
                            600.0);
    CHECK(r.worst_rest < 5e-3);
  }
}
