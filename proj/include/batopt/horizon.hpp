#pragma once

#include <string>
#include <vector>

#include "batopt/ocp.hpp"

namespace batopt {

inline constexpr double kDaySeconds = 86400.0;

struct WindowPlan {
  int n_days = 1;
  double window_s = 2.0 * kDaySeconds;
  double commit_s = kDaySeconds;
  Objective objective = Objective::profit;
  double interval_s = 900.0;
  double step_s = 5.0;
  double u_min = 0.0;  // both zero: model default bound
  double u_max = 0.0;
  double voltage_margin = 1e-3;
  CostContext start_context;  // battery age and throughput at the start of day 0
  SolverOptions solver;

  void validate() const;
};

struct DayRecord {
  int day = 0;
  SolveReport report;
  bool rest = false;       // solver failed, zero control committed
  double revenue = 0.0;    // committed day, EUR
  double cost = 0.0;       // committed day, model estimate, EUR
};

struct YearRun {
  ModelKind model = ModelKind::bucket;
  Objective objective = Objective::profit;
  ControlProfile committed;
  std::vector<std::vector<double>> boundary_states;  // n_days + 1
  std::vector<DayRecord> days;
  CostContext end_context;

  int rest_days() const;
  double revenue() const;
  double cost() const;
};

// Spec for one window starting `offset_s` into the prices.
OcpSpec window_spec(const WindowPlan& plan, const ModelSetup& model, const PriceSeries& prices,
                    double offset_s, double horizon_s, std::vector<double> x0, CostContext ctx);

// Optimise `window_s`, keep the first `commit_s`, carry the state forward.
// Prices must cover n_days * commit_s + (window_s - commit_s).
// `log` receives one line per window when non-null.
YearRun run_sliding(const WindowPlan& plan, const ModelSetup& model, const PriceSeries& prices,
                    const std::vector<double>& initial_state, std::vector<std::string>* log = nullptr);

// Battery age and throughput after a committed stretch.
CostContext advance_context(CostContext ctx, const ControlProfile& committed);

}  // namespace batopt
