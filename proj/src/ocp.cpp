#include "batopt/ocp.hpp"

#include <chrono>
#include <cmath>

#include "batopt/errors.hpp"

namespace batopt {

OcpSolution solve_bucket_lp(const OcpSpec& spec, const LpOptions& opt) {
  if (spec.model.kind() != ModelKind::bucket) throw ConfigError("LP path requires the bucket model");
  if (!std::isfinite(spec.control_lower()) || !std::isfinite(spec.control_upper()))
    throw ConfigError("bucket LP needs a finite power bound P_bound");
  auto t0 = std::chrono::steady_clock::now();
  NlpInstance nlp(spec);
  const BucketParams& bp = spec.model.bucket_params();
  const double pmax = spec.control_upper();
  const double pmin = spec.control_lower();
  if (pmax < 0.0 || pmin > 0.0) throw ConfigError("bucket LP needs bounds containing zero");
  const double ps = std::max(pmax, -pmin);  // variables are powers in units of ps
  const int n = nlp.intervals();
  const double hours = spec.interval_s / 3600.0;
  const double z0 = spec.initial_state[0];
  const bool profit = spec.objective == Objective::profit;

  // Columns: p+_k, p-_k, m. Rows: soc upper, soc lower, |P| epigraph.
  const int nv = 2 * n + 1;
  const int mi = nv - 1;
  LpProblem lp;
  lp.c = Eigen::VectorXd::Zero(nv);
  lp.A = Eigen::MatrixXd::Zero(3 * n, nv);
  lp.b = Eigen::VectorXd::Zero(3 * n);
  lp.lo = Eigen::VectorXd::Zero(nv);
  lp.hi = Eigen::VectorXd::Zero(nv);
  const double wh_per_unit = ps * hours;
  const double cw = profit ? bp.degradation_cost_per_wh * bp.cells : 0.0;
  const auto& price = nlp.interval_prices();
  for (int k = 0; k < n; ++k) {
    double rev = bp.cells * price[static_cast<std::size_t>(k)] * wh_per_unit;
    lp.c[k] = rev + cw * bp.k_throughput * wh_per_unit;
    lp.c[n + k] = -rev + cw * bp.k_throughput * wh_per_unit;
    lp.hi[k] = pmax / ps;
    lp.hi[n + k] = -pmin / ps;
  }
  lp.c[mi] = cw * bp.k_power * ps;
  lp.hi[mi] = 2.0;
  const double dz = wh_per_unit / bp.energy_wh;
  for (int k = 1; k <= n; ++k) {
    int r = k - 1;
    for (int j = 0; j < k; ++j) {
      lp.A(r, j) = dz;
      lp.A(r, n + j) = -dz;
      lp.A(n + r, j) = -dz;
      lp.A(n + r, n + j) = dz;
    }
    lp.b[r] = 1.0 - z0;
    lp.b[n + r] = z0;
  }
  for (int k = 0; k < n; ++k) {
    lp.A(2 * n + k, k) = 1.0;
    lp.A(2 * n + k, n + k) = 1.0;
    lp.A(2 * n + k, mi) = -1.0;
  }

  LpResult res = solve_lp(lp, opt);

  OcpSolution sol;
  sol.profile.kind = ControlKind::power_w;
  sol.profile.interval_s = spec.interval_s;
  sol.profile.values.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    double p = ps * (res.x[k] - res.x[n + k]);
    sol.profile.values[static_cast<std::size_t>(k)] = std::clamp(p, pmin, pmax);
  }
  sol.w = nlp.rollout(sol.profile.values);
  ProfileEconomics econ = evaluate_profile(spec, sol.profile);
  SolveReport& rep = sol.report;
  rep.objective = profit ? econ.profit : econ.revenue;
  rep.revenue = econ.revenue;
  rep.degradation_cost = econ.cost;
  rep.max_defect = 0.0;
  rep.max_violation = econ.max_violation;
  rep.kkt = res.gap;
  rep.iterations = res.iterations;
  if (res.status == LpStatus::optimal && res.gap <= 1e-9) {
    rep.status = SolveStatus::optimal;
  } else if (res.status == LpStatus::unbounded) {
    rep.status = SolveStatus::infeasible;
    rep.message = "LP unbounded";
  } else {
    rep.status = SolveStatus::max_iter;
    rep.message = res.status == LpStatus::optimal ? "LP duality gap above 1e-9" : "LP iteration limit";
  }
  rep.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sol;
}

OcpSolution solve_ocp(const OcpSpec& spec, const SolverOptions& opt, std::span<const double> u_guess) {
  if (spec.model.kind() == ModelKind::bucket) return solve_bucket_lp(spec);
  NlpInstance nlp(spec);
  return solve_nlp(nlp, opt, u_guess);
}

ProfileEconomics evaluate_profile(const OcpSpec& spec, const ControlProfile& profile) {
  NlpInstance nlp(spec);
  if (profile.size() != static_cast<std::size_t>(nlp.intervals()) ||
      std::abs(profile.interval_s - spec.interval_s) > 1e-9)
    throw ConfigError("profile does not match the horizon grid");
  std::vector<double> w = nlp.rollout(profile.values);
  NlpEvaluation ev = nlp.evaluate(w, false);
  ProfileEconomics e;
  e.revenue = ev.revenue;
  e.cost = ev.cost;
  if (spec.model.kind() == ModelKind::bucket) {
    const BucketParams& bp = spec.model.bucket_params();
    e.cost = bp.degradation_cost_per_wh * bp.cells * bucket_lost_capacity(profile, bp);
  }
  e.profit = e.revenue - e.cost;
  e.max_violation = nlp.max_violation(w, ev);
  return e;
}

}  // namespace batopt
