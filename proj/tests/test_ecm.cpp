#include <doctest.h>

#include <cmath>
#include <vector>

#include "batopt/ecm.hpp"
#include "batopt/errors.hpp"
#include "batopt/params_io.hpp"

using namespace batopt;

namespace {

EcmParams simple_params() {
  EcmParams p = default_ecm_params().ecm;
  p.ocv = Table1d({0.0, 0.5, 1.0}, {3.0, 3.7, 4.2}, Table1d::Method::linear);
  p.r_series = 0.01;
  p.r_parallel = 0.02;
  return p;
}

// Largest deviation of forward Euler from exp(-t/tau) over n steps of size a = dt/tau,
// together with the first-order bound n a^2/2 e^{-(n-1) a} at each step.
struct RcCheck {
  double worst_ratio = 0.0;
  double max_err = 0.0;
};

RcCheck rc_decay(const EcmParams& p, double dt, double horizon) {
  const double tau = p.time_constant_s();
  const double a = dt / tau;
  EcmState s{0.5, 1.0};
  RcCheck r;
  int n = static_cast<int>(std::lround(horizon / dt));
  for (int k = 1; k <= n; ++k) {
    s = ecm_step(s, 0.0, dt, p).state;
    double t = k * dt;
    double err = std::abs(s.i_r - std::exp(-t / tau));
    double bound = k * a * a / 2.0 * std::exp(-(k - 1) * a);
    r.max_err = std::max(r.max_err, err);
    r.worst_ratio = std::max(r.worst_ratio, err / bound);
  }
  return r;
}

}  // namespace

TEST_SUITE("ecm") {
  TEST_CASE("zero current at rest leaves the state unchanged") {
    EcmParams p = simple_params();
    auto r = ecm_step({0.42, 0.0}, 0.0, 5.0, p);
    CHECK(r.state.soc == 0.42);
    CHECK(r.state.i_r == 0.0);
    CHECK_FALSE(r.violation);
  }

  TEST_CASE("branch current equal to the input is a fixed point") {
    EcmParams p = simple_params();
    EcmState s{0.5, 1.3};
    for (int i = 0; i < 500; ++i) s = ecm_step(s, 1.3, 5.0, p).state;
    CHECK(s.i_r == doctest::Approx(1.3).epsilon(1e-14));
    CHECK(s.soc == doctest::Approx(0.5 + 1.3 * 2500.0 / 3600.0 / p.capacity_ah));
  }

  TEST_CASE("RC decay after one time constant") {
    EcmParams p = simple_params();
    const double tau = p.time_constant_s();
    const double dt = 5.0;
    EcmState s{0.5, 1.0};
    int n = static_cast<int>(std::lround(tau / dt));
    for (int i = 0; i < n; ++i) s = ecm_step(s, 0.0, dt, p).state;
    CHECK(std::abs(s.i_r - std::exp(-1.0)) <= dt / tau);
  }

  TEST_CASE("Euler error stays within the first-order bound over ten time constants") {
    EcmParams p = simple_params();
    for (double dt : {5.0, 2.5, 1.0}) {
      RcCheck r = rc_decay(p, dt, 10.0 * p.time_constant_s());
      CHECK(r.worst_ratio <= 1.0);
    }
  }

  TEST_CASE("Euler error converges at first order") {
    EcmParams p = simple_params();
    double e1 = rc_decay(p, 5.0, 10.0 * p.time_constant_s()).max_err;
    double e2 = rc_decay(p, 2.5, 10.0 * p.time_constant_s()).max_err;
    CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.01));
  }

  TEST_CASE("step contract and violation flag") {
    EcmParams p = simple_params();
    CHECK_THROWS_AS(ecm_step({0.5, 0.0}, 1.0, 5.5, p), RangeError);
    CHECK_THROWS_AS(ecm_step({0.5, 0.0}, 1.0, 0.0, p), RangeError);
    auto r = ecm_step({0.9999, 0.0}, 10.0, 5.0, p);
    CHECK(r.violation);
    CHECK(r.state.soc > 1.0);
  }

  TEST_CASE("terminal voltage examples") {
    EcmParams p = simple_params();
    // 3.7 V at z = 0.5; discharge current with the branch current in the same direction
    CHECK(ecm_voltage({0.5, -1.0}, -2.0, p) == doctest::Approx(3.66).epsilon(1e-14));
    CHECK(ecm_voltage({0.5, 1.0}, 2.0, p) == doctest::Approx(3.74).epsilon(1e-14));
    CHECK(ecm_voltage({0.5, 0.0}, 0.0, p) == 3.7);
  }

  TEST_CASE("shipped OCV table is reproduced at its breakpoints") {
    EcmParams p = default_ecm_params().ecm;
    const auto& x = p.ocv.x();
    const auto& y = p.ocv.y();
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(ecm_voltage({x[i], 0.0}, 0.0, p) == y[i]);
  }

  TEST_CASE("calendar coefficient matches an independent evaluation") {
    SchmalstiegParams q;
    CHECK(schmalstieg_alpha(3.7, 298.15, q) == doctest::Approx(0.00028677592804639913).epsilon(1e-12));
    CHECK(schmalstieg_beta(3.8, 0.3, q) == doctest::Approx(0.002114278772).epsilon(1e-12));
  }

  TEST_CASE("lost capacity regression values") {
    EcmParams p = simple_params();
    SchmalstiegParams q;
    q.scale_divisor = 1.0;
    ProfileStats s;
    s.v_mean = 3.7;
    s.v_rms = 3.7;
    s.temperature_k = 298.15;
    s.duration_s = 100.0 * 3600.0;
    s.throughput_ah = 0.0;
    CHECK(schmalstieg_lost_capacity(s, p, q) ==
          doctest::Approx(0.0022581252487297275).epsilon(1e-12));

    ProfileStats c;
    c.v_rms = 3.8;
    c.v_mean = 3.0;  // below the calendar threshold
    c.soc_dev = 0.3;
    c.duration_s = 0.0;
    c.throughput_ah = 10.0;
    q.scale_divisor = 5.0;
    CHECK(schmalstieg_alpha(3.0, 298.15, q) == 0.0);
    CHECK(schmalstieg_lost_capacity(c, p, q) ==
          doctest::Approx(0.0036104057251544718).epsilon(1e-12));
  }

  TEST_CASE("no age and no throughput means no loss") {
    EcmParams p = simple_params();
    SchmalstiegParams q;
    ProfileStats s;
    s.v_mean = 4.0;
    s.v_rms = 4.0;
    CHECK(schmalstieg_lost_capacity(s, p, q) == 0.0);
    s.throughput_ah = -1.0;
    CHECK_THROWS_AS(schmalstieg_lost_capacity(s, p, q), DomainError);
  }

  TEST_CASE("loss is monotone in age and throughput and linear in the divisor") {
    EcmParams p = simple_params();
    SchmalstiegParams q;
    ProfileStats s;
    s.v_mean = 3.9;
    s.v_rms = 3.9;
    s.soc_dev = 0.2;
    double prev = -1.0;
    for (double days : {0.5, 1.0, 2.0, 10.0}) {
      s.duration_s = days * 86400.0;
      double v = schmalstieg_lost_capacity(s, p, q);
      CHECK(v > prev);
      prev = v;
    }
    prev = -1.0;
    for (double ah : {0.0, 1.0, 5.0, 50.0}) {
      s.throughput_ah = ah;
      double v = schmalstieg_lost_capacity(s, p, q);
      CHECK(v > prev);
      prev = v;
    }
    double base = schmalstieg_lost_capacity(s, p, q);
    q.scale_divisor /= 2.0;
    CHECK(schmalstieg_lost_capacity(s, p, q) == doctest::Approx(2.0 * base).epsilon(1e-14));
  }

  TEST_CASE("window losses add up to the cumulative loss") {
    EcmParams p = simple_params();
    SchmalstiegParams q;
    ProfileStats w;
    w.v_mean = 3.8;
    w.v_rms = 3.8;
    w.soc_dev = 0.25;
    w.duration_s = 86400.0;
    w.throughput_ah = 4.0;
    double total = 0.0;
    for (int d = 0; d < 5; ++d) total += schmalstieg_window_loss(w, d * 86400.0, d * 4.0, p, q);
    ProfileStats all = w;
    all.duration_s = 5 * 86400.0;
    all.throughput_ah = 20.0;
    CHECK(total == doctest::Approx(schmalstieg_lost_capacity(all, p, q)).epsilon(1e-12));
  }

  TEST_CASE("profile statistics examples") {
    std::vector<double> v(10, 3.6), z(10, 0.5), i(10, 0.0);
    auto s = profile_stats(z, v, i, 298.15, 3600.0);
    CHECK(s.v_mean == doctest::Approx(3.6).epsilon(1e-15));
    CHECK(s.v_rms == doctest::Approx(3.6).epsilon(1e-15));
    CHECK(s.soc_dev == 0.0);
    CHECK(s.throughput_ah == 0.0);

    std::vector<double> sq{0.4, 0.6, 0.4, 0.6, 0.4, 0.6};
    std::vector<double> cur{2.0, -2.0, 2.0, -2.0, 2.0, -2.0};
    std::vector<double> vv(6, 3.7);
    auto t = profile_stats(sq, vv, cur, 298.15, 6 * 1800.0);
    CHECK(t.soc_dev == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(t.throughput_ah == doctest::Approx(6.0).epsilon(1e-14));

    std::vector<double> empty;
    CHECK_THROWS_AS(profile_stats(empty, empty, empty, 298.15, 1.0), DomainError);
  }
}
