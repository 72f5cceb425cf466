#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "batopt/errors.hpp"
#include "batopt/ocp.hpp"
#include "batopt/params_io.hpp"
#include "ocp_checks.hpp"
#include "test_util.hpp"

using namespace batopt;

namespace {

PriceSeries desk_prices() { return load_prices(data_dir() / "prices" / "desk_prices.csv"); }

// 1 Wh battery, 1 W bound, one cell, hourly control.
OcpSpec toy_bucket(std::vector<double> eur_mwh, double soc0, Objective obj) {
  BucketParams bp = default_bucket_params();
  bp.energy_wh = 1.0;
  bp.power_bound_w = 1.0;
  bp.cells = 1.0;
  OcpSpec s = make_spec(ModelSetup::bucket(bp), obj, testutil::prices(eur_mwh), soc0,
                        3600.0 * static_cast<double>(eur_mwh.size()));
  s.interval_s = 3600.0;
  return s;
}

// Profit of an hourly power profile on the toy battery, written out directly.
double toy_profit(const OcpSpec& s, const std::vector<double>& p, bool* feasible) {
  const BucketParams& bp = s.model.bucket_params();
  double z = s.initial_state[0], rev = 0.0, thr = 0.0, pmax = 0.0;
  *feasible = true;
  for (std::size_t k = 0; k < p.size(); ++k) {
    z += p[k] / bp.energy_wh;
    if (z < -1e-12 || z > 1.0 + 1e-12) *feasible = false;
    rev -= p[k] * s.prices.eur_per_mwh()[k] * 1e-6;
    thr += std::abs(p[k]);
    pmax = std::max(pmax, std::abs(p[k]));
  }
  double cost = bp.degradation_cost_per_wh * (bp.k_power * pmax + bp.k_throughput * thr);
  return s.objective == Objective::profit ? rev - cost : rev;
}

ControlProfile hourly(std::vector<double> v, double interval_s = 3600.0) {
  ControlProfile p;
  p.kind = ControlKind::power_w;
  p.interval_s = interval_s;
  p.values = std::move(v);
  return p;
}

}  // namespace

TEST_SUITE("ocp") {
  TEST_CASE("variable and defect counts") {
    PriceSeries prices = testutil::daily_pattern(2);
    NlpInstance spm(make_spec(ModelSetup::spm(default_spm_params()), Objective::profit, prices, 0.5));
    CHECK(spm.intervals() == 192);
    CHECK(spm.variable_count() == 2701);
    CHECK(spm.defect_count() == 192u * 13u);
    NlpInstance ecm(make_spec(ModelSetup::ecm(default_ecm_params()), Objective::profit, prices, 0.5,
                              24 * 3600.0));
    CHECK(ecm.variable_count() == 290);
    CHECK(ecm.defect_count() == 192);
    CHECK(ecm.steps() == 180);
  }

  TEST_CASE("invalid horizons are configuration errors") {
    PriceSeries prices = testutil::daily_pattern(2);
    auto m = ModelSetup::ecm(default_ecm_params());
    CHECK_THROWS_AS(NlpInstance(make_spec(m, Objective::profit, prices, 0.5, 0.0)), ConfigError);
    CHECK_THROWS_AS(NlpInstance(make_spec(m, Objective::profit, prices, 0.5, 1000.0)), ConfigError);
    CHECK_THROWS_AS(NlpInstance(make_spec(m, Objective::profit, prices, 0.5, 72 * 3600.0)), ConfigError);
    OcpSpec s = make_spec(m, Objective::profit, prices, 0.5);
    s.step_s = 7.0;
    CHECK_THROWS_AS(NlpInstance{s}, ConfigError);
  }

  TEST_CASE("defect Jacobian is block banded") {
    PriceSeries prices = testutil::daily_pattern(1);
    NlpInstance nlp(make_spec(ModelSetup::ecm(default_ecm_params()), Objective::profit, prices, 0.5,
                              6 * 3600.0));
    std::vector<double> u(static_cast<std::size_t>(nlp.intervals()), 0.5);
    std::vector<double> w = nlp.rollout(u);
    const int nx = nlp.state_dim();
    for (const SparseEntry& e : nlp.defect_jacobian(w)) {
      int k = static_cast<int>(e.row) / nx;
      bool own_x = e.col >= nlp.x_index(k, 0) && e.col < nlp.x_index(k + 1, 0);
      bool next_x = e.col >= nlp.x_index(k + 1, 0) && e.col < nlp.x_index(k + 2, 0);
      bool own_u = e.col == nlp.u_index(k);
      CHECK((own_x || next_x || own_u));
      if (next_x) CHECK(e.value == -1.0);
    }
  }

  TEST_CASE("rollout nodes have zero defects") {
    PriceSeries prices = testutil::daily_pattern(1);
    NlpInstance nlp(make_spec(ModelSetup::spm(default_spm_params()), Objective::profit, prices, 0.5,
                              3 * 3600.0));
    std::vector<double> u{1.0, -0.5, 0.0, 2.0, -2.0, 0.3, 0.1, -1.0, 0.0, 0.5, 0.5, -0.5};
    std::vector<double> w = nlp.rollout(u);
    for (double d : nlp.defects(w)) CHECK(d == 0.0);
    CHECK(nlp.controls(w) == u);
  }

  TEST_CASE("evaluation failures name the offending variables") {
    PriceSeries prices = testutil::daily_pattern(1);
    NlpInstance nlp(make_spec(ModelSetup::spm(default_spm_params()), Objective::profit, prices, 0.5,
                              3 * 3600.0));
    std::vector<double> w = nlp.rollout(std::vector<double>(12, 0.0));
    for (int i = 0; i < 5; ++i) w[nlp.x_index(4, 5 + i)] = -100.0;
    try {
      nlp.evaluate(w, false);
      FAIL("expected EvaluationError");
    } catch (const EvaluationError& e) {
      CHECK(e.first_variable() == nlp.x_index(4, 0));
      CHECK(e.last_variable() == nlp.u_index(4));
    }
  }

  TEST_CASE("gradients match central differences at random feasible points") {
    PriceSeries prices = desk_prices();
    std::mt19937 rng(2024);
    struct Case {
      ModelSetup model;
      double soc;
      double step;
    };
    // The ECM OCV is piecewise linear; a short step keeps the difference off its knots.
    std::vector<Case> cases{{ModelSetup::bucket(default_bucket_params()), 0.5, 1e-6},
                            {ModelSetup::ecm(default_ecm_params()), 0.473, 1e-7},
                            {ModelSetup::spm(default_spm_params()), 0.5, 1e-6}};
    for (const Case& c : cases)
      for (Objective obj : {Objective::revenue, Objective::profit}) {
        NlpInstance nlp(make_spec(c.model, obj, prices, c.soc, 6 * 3600.0));
        for (int t = 0; t < 5; ++t) {
          std::vector<double> w = ocpcheck::random_feasible_point(nlp, rng);
          REQUIRE_FALSE(w.empty());
          auto r = ocpcheck::check_gradient(nlp, w, c.step);
          CAPTURE(static_cast<int>(c.model.kind()));
          CAPTURE(t);
          CHECK(r.max_rel_error <= 1e-5);
        }
      }
  }

  TEST_CASE("bucket LP: flat prices give an idle profile") {
    OcpSpec s = make_spec(ModelSetup::bucket(default_bucket_params()), Objective::profit,
                          testutil::prices(std::vector<double>(48, 45.0)), 0.0);
    OcpSolution sol = solve_bucket_lp(s);
    CHECK(sol.report.status == SolveStatus::optimal);
    for (double p : sol.profile.values) CHECK(p == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    CHECK(sol.report.objective == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  }

  TEST_CASE("bucket LP: two-hour toy matches bang-bang enumeration") {
    for (Objective obj : {Objective::revenue, Objective::profit}) {
      OcpSpec s = toy_bucket({1e6, 3e6}, 0.0, obj);
      double best = -std::numeric_limits<double>::infinity();
      std::vector<double> arg;
      for (double a : {-1.0, 0.0, 1.0})
        for (double b : {-1.0, 0.0, 1.0}) {
          bool ok = false;
          double v = toy_profit(s, {a, b}, &ok);
          if (ok && v > best) {
            best = v;
            arg = {a, b};
          }
        }
      REQUIRE(arg == std::vector<double>{1.0, -1.0});
      OcpSolution sol = solve_bucket_lp(s);
      CHECK(sol.report.status == SolveStatus::optimal);
      CHECK(sol.profile.values[0] == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(sol.profile.values[1] == doctest::Approx(-1.0).epsilon(1e-12));
      CHECK(sol.report.objective == doctest::Approx(best).epsilon(1e-12));
    }
  }

  TEST_CASE("bucket LP beats hand-built profiles") {
    PriceSeries prices = desk_prices();
    OcpSpec s = make_spec(ModelSetup::bucket(default_bucket_params()), Objective::profit, prices, 0.5);
    OcpSolution sol = solve_bucket_lp(s);
    REQUIRE(sol.report.status == SolveStatus::optimal);
    const double pb = default_bucket_params().power_bound_w;
    std::vector<std::vector<double>> candidates;
    candidates.push_back(std::vector<double>(192, 0.0));
    // charge in the cheap night hours, discharge in the evening, both days
    std::vector<double> daily(192, 0.0);
    for (int d = 0; d < 2; ++d) {
      for (int k = 8; k < 16; ++k) daily[static_cast<std::size_t>(96 * d + k)] = 0.25 * pb;
      for (int k = 72; k < 80; ++k) daily[static_cast<std::size_t>(96 * d + k)] = -0.25 * pb;
    }
    candidates.push_back(daily);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-0.2 * pb, 0.2 * pb);
    for (int t = 0; t < 20; ++t) {
      std::vector<double> v(192);
      for (double& x : v) x = u(rng);
      candidates.push_back(v);
    }
    for (const auto& v : candidates) {
      ProfileEconomics e = evaluate_profile(s, hourly(v, 900.0));
      if (e.max_violation > 0.0) continue;
      CHECK(sol.report.objective >= e.profit - 1e-12);
    }
  }

  TEST_CASE("bucket LP reproduces an independent LP solution on the desk prices") {
    // Reference optima from an external simplex/interior-point code on the same 48 h instance.
    PriceSeries prices = desk_prices();
    auto m = ModelSetup::bucket(default_bucket_params());
    OcpSolution rev = solve_bucket_lp(make_spec(m, Objective::revenue, prices, 0.5));
    OcpSolution pro = solve_bucket_lp(make_spec(m, Objective::profit, prices, 0.5));
    CHECK(rev.report.status == SolveStatus::optimal);
    CHECK(pro.report.status == SolveStatus::optimal);
    CHECK(rev.report.objective == doctest::Approx(1.2824434349999998).epsilon(1e-9));
    CHECK(pro.report.objective == doctest::Approx(0.6276345075).epsilon(1e-9));
    CHECK(rev.report.max_violation <= 1e-12);
  }

  TEST_CASE("doubling the cell count doubles the optimum with the same profile") {
    PriceSeries prices = desk_prices();
    BucketParams bp = default_bucket_params();
    OcpSolution one = solve_bucket_lp(make_spec(ModelSetup::bucket(bp), Objective::profit, prices, 0.5));
    bp.cells *= 2.0;
    OcpSolution two = solve_bucket_lp(make_spec(ModelSetup::bucket(bp), Objective::profit, prices, 0.5));
    CHECK(two.report.objective == doctest::Approx(2.0 * one.report.objective).epsilon(1e-12));
    for (std::size_t k = 0; k < one.profile.size(); ++k)
      CHECK(two.profile.values[k] == doctest::Approx(one.profile.values[k]).scale(1.0).epsilon(1e-9));
  }

  TEST_CASE("tightening power bounds never raises the LP optimum") {
    PriceSeries prices = desk_prices();
    auto m = ModelSetup::bucket(default_bucket_params());
    double prev = std::numeric_limits<double>::infinity();
    for (double frac : {1.0, 0.5, 0.25, 0.1}) {
      OcpSpec s = make_spec(m, Objective::profit, prices, 0.5);
      s.u_max = frac * default_bucket_params().power_bound_w;
      s.u_min = -s.u_max;
      OcpSolution sol = solve_bucket_lp(s);
      REQUIRE(sol.report.status == SolveStatus::optimal);
      CHECK(sol.report.objective <= prev + 1e-12);
      prev = sol.report.objective;
    }
  }

  TEST_CASE("bucket LP rejects unbounded power and other models") {
    PriceSeries prices = desk_prices();
    OcpSpec s = make_spec(ModelSetup::bucket(default_bucket_params()), Objective::revenue, prices, 0.5);
    s.u_max = std::numeric_limits<double>::infinity();
    s.u_min = -s.u_max;
    CHECK_THROWS_AS(solve_bucket_lp(s), ConfigError);
    OcpSpec e = make_spec(ModelSetup::ecm(default_ecm_params()), Objective::revenue, prices, 0.5);
    CHECK_THROWS_AS(solve_bucket_lp(e), ConfigError);
  }

  TEST_CASE("bucket as NLP: two-interval toy matches a grid search") {
    OcpSpec s = toy_bucket({1e6, 3e6}, 0.0, Objective::profit);
    double best = -std::numeric_limits<double>::infinity();
    double ba = 0.0, bb = 0.0;
    for (int i = -100; i <= 100; ++i)
      for (int j = -100; j <= 100; ++j) {
        bool ok = false;
        double v = toy_profit(s, {i / 100.0, j / 100.0}, &ok);
        if (ok && v > best) {
          best = v;
          ba = i / 100.0;
          bb = j / 100.0;
        }
      }
    REQUIRE(ba == 1.0);
    REQUIRE(bb == -1.0);
    NlpInstance nlp(s);
    OcpSolution sol = solve_nlp(nlp);
    CHECK(sol.report.status != SolveStatus::infeasible);
    CHECK(sol.profile.values[0] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(sol.profile.values[1] == doctest::Approx(-1.0).epsilon(1e-4));
    CHECK(evaluate_profile(s, sol.profile).profit == doctest::Approx(best).epsilon(1e-4));
  }

  TEST_CASE("bucket as NLP: constant prices leave the battery idle") {
    BucketParams bp = default_bucket_params();
    OcpSpec s = make_spec(ModelSetup::bucket(bp), Objective::profit,
                          testutil::prices(std::vector<double>(6, 45.0)), 0.0, 6 * 3600.0);
    NlpInstance nlp(s);
    OcpSolution sol = solve_nlp(nlp);
    CHECK(sol.report.status != SolveStatus::infeasible);
    for (double p : sol.profile.values) CHECK(std::abs(p) <= 1e-3 * bp.power_bound_w);
    CHECK(evaluate_profile(s, sol.profile).profit <= 0.0);
    CHECK(evaluate_profile(s, sol.profile).profit >= -1e-3);
  }

  TEST_CASE("profit objective dominates on a short ECM window") {
    PriceSeries prices = desk_prices();
    auto m = ModelSetup::ecm(default_ecm_params());
    OcpSpec rs = make_spec(m, Objective::revenue, prices, 0.5, 6 * 3600.0);
    OcpSpec ps = make_spec(m, Objective::profit, prices, 0.5, 6 * 3600.0);
    OcpSolution rev = solve_ocp(rs);
    OcpSolution pro = solve_ocp(ps, {}, rev.profile.values);
    REQUIRE(rev.report.status != SolveStatus::infeasible);
    REQUIRE(pro.report.status != SolveStatus::infeasible);
    double p_rev = evaluate_profile(ps, rev.profile).profit;
    double p_pro = evaluate_profile(ps, pro.profile).profit;
    CHECK(p_pro >= p_rev - 1e-6 * std::abs(p_rev));
    CHECK(pro.report.max_violation <= 1e-8);
  }

  TEST_CASE("tightening current bounds does not raise the ECM optimum") {
    PriceSeries prices = desk_prices();
    auto m = ModelSetup::ecm(default_ecm_params());
    OcpSpec wide = make_spec(m, Objective::revenue, prices, 0.5, 6 * 3600.0);
    OcpSpec narrow = wide;
    narrow.u_max = 0.5 * m.default_control_bound();
    narrow.u_min = -narrow.u_max;
    OcpSolution n = solve_ocp(narrow);
    std::vector<double> guess = n.profile.values;
    OcpSolution w = solve_ocp(wide, {}, guess);
    REQUIRE(n.report.status != SolveStatus::infeasible);
    CHECK(w.report.objective >= n.report.objective - 1e-9);
  }
}
