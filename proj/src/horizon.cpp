#include "batopt/horizon.hpp"

#include <cmath>

#include <json.hpp>

#include "batopt/errors.hpp"

namespace batopt {

void WindowPlan::validate() const {
  if (n_days < 1) throw ConfigError("n_days must be >= 1");
  if (!(commit_s >= kDaySeconds) || !(window_s >= commit_s))
    throw ConfigError("window >= commit >= 1 day required");
  double q = commit_s / interval_s;
  if (!(interval_s > 0.0) || std::abs(q - std::round(q)) > 1e-9)
    throw ConfigError("commit length is not a multiple of the control interval");
}

int YearRun::rest_days() const {
  int n = 0;
  for (const auto& d : days) n += d.rest ? 1 : 0;
  return n;
}

double YearRun::revenue() const {
  double s = 0.0;
  for (const auto& d : days) s += d.revenue;
  return s;
}

double YearRun::cost() const {
  double s = 0.0;
  for (const auto& d : days) s += d.cost;
  return s;
}

OcpSpec window_spec(const WindowPlan& plan, const ModelSetup& model, const PriceSeries& prices,
                    double offset_s, double horizon_s, std::vector<double> x0, CostContext ctx) {
  OcpSpec s;
  s.model = model;
  s.objective = plan.objective;
  s.horizon_s = horizon_s;
  s.interval_s = plan.interval_s;
  s.step_s = plan.step_s;
  s.initial_state = std::move(x0);
  s.prices = prices;
  s.price_offset_s = offset_s;
  s.u_min = plan.u_min;
  s.u_max = plan.u_max;
  s.cost_context = ctx;
  s.voltage_margin = plan.voltage_margin;
  return s;
}

CostContext advance_context(CostContext ctx, const ControlProfile& committed) {
  ctx.age_s += committed.duration_s();
  if (committed.kind == ControlKind::current_a)
    for (double v : committed.values) ctx.throughput_ah += std::abs(v) * committed.interval_s / 3600.0;
  return ctx;
}

YearRun run_sliding(const WindowPlan& plan, const ModelSetup& model, const PriceSeries& prices,
                    const std::vector<double>& initial_state, std::vector<std::string>* log) {
  plan.validate();
  const double need = plan.n_days * plan.commit_s + (plan.window_s - plan.commit_s);
  if (prices.horizon_s() + 1e-9 < need)
    throw ConfigError("prices cover " + std::to_string(prices.horizon_s() / 3600.0) + " h, the run needs " +
                      std::to_string(need / 3600.0) + " h");
  const int commit_n = static_cast<int>(std::lround(plan.commit_s / plan.interval_s));

  YearRun run;
  run.model = model.kind();
  run.objective = plan.objective;
  run.committed.kind = model.shooting()->control_kind();
  run.committed.interval_s = plan.interval_s;
  run.boundary_states.push_back(initial_state);

  CostContext ctx = plan.start_context;
  std::vector<double> x = initial_state;
  std::vector<double> warm;
  for (int day = 0; day < plan.n_days; ++day) {
    const double offset = day * plan.commit_s;
    OcpSpec spec = window_spec(plan, model, prices, offset, plan.window_s, x, ctx);
    DayRecord rec;
    rec.day = day;
    OcpSolution sol = solve_ocp(spec, plan.solver, warm);
    rec.report = sol.report;
    std::vector<double> day_u(static_cast<std::size_t>(commit_n), 0.0);
    if (sol.report.status == SolveStatus::infeasible || sol.profile.size() < static_cast<std::size_t>(commit_n)) {
      rec.rest = true;
      warm.clear();
    } else {
      std::copy(sol.profile.values.begin(), sol.profile.values.begin() + commit_n, day_u.begin());
      warm.assign(sol.profile.values.begin() + commit_n, sol.profile.values.end());
      warm.resize(sol.profile.size(), 0.0);
    }

    ControlProfile day_profile;
    day_profile.kind = run.committed.kind;
    day_profile.interval_s = plan.interval_s;
    day_profile.values = day_u;
    OcpSpec day_spec = window_spec(plan, model, prices, offset, plan.commit_s, x, ctx);
    NlpInstance day_nlp(day_spec);
    std::vector<double> w = day_nlp.rollout(day_u);
    ProfileEconomics econ = evaluate_profile(day_spec, day_profile);
    rec.revenue = econ.revenue;
    rec.cost = econ.cost;

    const int nx = day_nlp.state_dim();
    x.assign(w.begin() + static_cast<std::ptrdiff_t>(day_nlp.x_index(commit_n, 0)),
             w.begin() + static_cast<std::ptrdiff_t>(day_nlp.x_index(commit_n, 0)) + nx);
    run.boundary_states.push_back(x);
    run.committed.append(day_profile);
    ctx = advance_context(ctx, day_profile);

    if (log) {
      nlohmann::ordered_json j;
      j["day"] = day;
      j["model"] = to_string(model.kind());
      j["objective"] = to_string(plan.objective);
      j["status"] = to_string(rec.report.status);
      j["window_objective"] = rec.report.objective;
      j["iterations"] = rec.report.iterations;
      j["kkt"] = rec.report.kkt;
      j["max_violation"] = rec.report.max_violation;
      j["wall_s"] = rec.report.wall_s;
      j["rest_day"] = rec.rest;
      j["day_revenue"] = rec.revenue;
      j["day_cost"] = rec.cost;
      j["message"] = rec.report.message;
      log->push_back(j.dump());
    }
    run.days.push_back(std::move(rec));
  }
  run.end_context = ctx;
  return run;
}

}  // namespace batopt
