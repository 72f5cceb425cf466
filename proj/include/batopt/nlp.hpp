#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "batopt/control_profile.hpp"
#include "batopt/market_data.hpp"
#include "batopt/shooting_models.hpp"

namespace batopt {

// Finite-horizon arbitrage problem for one battery model.
struct OcpSpec {
  ModelSetup model;
  Objective objective = Objective::profit;
  double horizon_s = 48.0 * 3600.0;
  double interval_s = 900.0;
  double step_s = 5.0;
  std::vector<double> initial_state;
  PriceSeries prices;
  double price_offset_s = 0.0;  // window start relative to prices
  double u_min = 0.0;           // both zero: model default bound
  double u_max = 0.0;
  CostContext cost_context;
  double voltage_margin = 1e-3;  // V kept clear of the limits inside the solver

  // Throws ConfigError on indivisible or empty horizons, bad bounds, missing prices.
  void validate() const;
  int intervals() const;
  int steps_per_interval() const;
  double control_lower() const;
  double control_upper() const;
};

struct NlpEvaluation {
  std::vector<IntervalResult> results;
  std::vector<double> defects;  // N * nx, integrate(x_k, u_k) - x_{k+1}
  double revenue = 0.0;         // pack cash flow, EUR
  double cost = 0.0;            // degradation cost estimate, EUR
  double objective = 0.0;       // maximised: profit or revenue
  // With derivatives:
  std::vector<std::vector<double>> jacobians;  // per interval, see ShootingModel::jacobian
  std::vector<double> gradient;                // d objective / d w
};

struct SparseEntry {
  std::size_t row;
  std::size_t col;
  double value;
};

// Multiple-shooting transcription. Variables are the node states x_0..x_N
// followed by the controls u_0..u_{N-1}.
class NlpInstance {
 public:
  explicit NlpInstance(OcpSpec spec);

  const OcpSpec& spec() const { return spec_; }
  const ShootingModel& model() const { return *model_; }
  int intervals() const { return n_; }
  int steps() const { return steps_; }
  int state_dim() const { return nx_; }
  std::size_t variable_count() const;
  std::size_t defect_count() const;
  std::size_t x_index(int k, int i) const { return static_cast<std::size_t>(k * nx_ + i); }
  std::size_t u_index(int k) const;

  // Per-interval mean price, EUR/Wh.
  const std::vector<double>& interval_prices() const { return prices_; }
  const std::vector<double>& lower_bounds() const { return lo_; }
  const std::vector<double>& upper_bounds() const { return hi_; }
  void path_bounds(std::vector<double>& lo, std::vector<double>& hi) const;

  NlpEvaluation evaluate(std::span<const double> w, bool derivatives) const;
  double objective(std::span<const double> w) const;
  std::vector<double> gradient(std::span<const double> w) const;
  std::vector<double> defects(std::span<const double> w) const;
  // Defect Jacobian as triplets: block (k, k) is [A_k  B_k], block (k, k+1) is -I.
  std::vector<SparseEntry> defect_jacobian(std::span<const double> w) const;

  // Nodes obtained by integrating `u` from the initial state; defects are zero.
  std::vector<double> rollout(std::span<const double> u) const;
  std::vector<double> initial_guess() const;
  std::vector<double> controls(std::span<const double> w) const;
  ControlProfile control_profile(std::span<const double> w) const;

  // Largest bound violation: states in units of their scale, path values in volts.
  double max_violation(std::span<const double> w, const NlpEvaluation& e) const;

 private:
  void integrate_interval(int k, std::span<const double> w, IntervalResult& r) const;

  OcpSpec spec_;
  std::shared_ptr<const ShootingModel> model_;
  std::shared_ptr<const WindowCost> cost_;
  int n_ = 0;
  int steps_ = 0;
  int nx_ = 0;
  int nq_ = 0;
  int np_ = 0;
  std::vector<double> prices_;
  std::vector<double> lo_;
  std::vector<double> hi_;
  std::vector<double> scale_;
};

OcpSpec make_spec(const ModelSetup& model, Objective objective, const PriceSeries& prices,
                  double initial_soc, double horizon_s = 48.0 * 3600.0);

}  // namespace batopt
