#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "batopt/bucket.hpp"
#include "batopt/control_profile.hpp"
#include "batopt/ecm.hpp"
#include "batopt/params_io.hpp"
#include "batopt/spm_model.hpp"

namespace batopt {

enum class ModelKind { bucket, ecm, spm };
enum class Objective { revenue, profit };

std::string to_string(ModelKind k);
std::string to_string(Objective o);
ModelKind parse_model_kind(const std::string& s);
Objective parse_objective(const std::string& s);

// Output of integrating one control interval.
struct IntervalResult {
  std::vector<double> x_end;
  // quad[0] is the integral of control times terminal voltage in Wh (power for the bucket).
  std::vector<double> quad;
  // Voltage at the interval start, three interior points and the end.
  std::vector<double> path;
};

inline constexpr int kPathSamples = 5;

// Dynamics of one battery model as seen by the transcription: constant control
// over an interval integrated with forward Euler steps.
class ShootingModel {
 public:
  virtual ~ShootingModel() = default;

  virtual ModelKind kind() const = 0;
  virtual ControlKind control_kind() const = 0;
  virtual int state_dim() const = 0;
  virtual int quad_dim() const = 0;
  virtual int path_dim() const = 0;

  virtual void integrate(std::span<const double> x0, double u, double dt, int steps,
                         IntervalResult& out) const = 0;

  // Jacobian of (x_end, quad, path) w.r.t. (x0, u); rows in that order, last column is u.
  // Default: central differences.
  virtual void jacobian(std::span<const double> x0, double u, double dt, int steps,
                        std::vector<double>& jac) const;

  virtual void state_bounds(std::vector<double>& lo, std::vector<double>& hi) const = 0;
  virtual void path_bounds(std::vector<double>& lo, std::vector<double>& hi) const = 0;
  virtual std::vector<double> state_scale() const = 0;
  virtual double default_control_bound() const = 0;
  virtual std::vector<double> initial_state(double soc) const = 0;
  virtual double soc(std::span<const double> x) const = 0;
  virtual double cells() const = 0;
};

struct CostContext {
  double age_s = 0.0;            // battery age before the window
  double throughput_ah = 0.0;    // charge throughput before the window
};

struct WindowView {
  const ShootingModel& model;
  int intervals;
  int steps;
  double dt;
  std::span<const double> w;                // NLP variables
  std::span<const IntervalResult> results;  // per interval
};

struct CostGradient {
  std::vector<double> dx;  // (N+1) * nx
  std::vector<double> du;  // N
  std::vector<double> dq;  // N * nq
};

// Degradation cost of one window in currency (pack level).
class WindowCost {
 public:
  virtual ~WindowCost() = default;
  virtual double value(const WindowView& v, CostGradient* grad) const = 0;
};

std::shared_ptr<const ShootingModel> make_bucket_shooting(const BucketParams& p);
std::shared_ptr<const ShootingModel> make_ecm_shooting(const EcmParams& p);
std::shared_ptr<const ShootingModel> make_spm_shooting(std::shared_ptr<const SpmModel> model);

std::shared_ptr<const WindowCost> make_bucket_cost(const BucketParams& p);
std::shared_ptr<const WindowCost> make_ecm_cost(const EcmParams& p, const SchmalstiegParams& q,
                                                CostContext ctx);
std::shared_ptr<const WindowCost> make_spm_cost(const SpmParams& p);

// A parameterised battery model ready for optimisation.
class ModelSetup {
 public:
  static ModelSetup bucket(BucketParams p);
  static ModelSetup ecm(EcmConfig c);
  static ModelSetup spm(SpmParams p);

  ModelKind kind() const { return kind_; }
  const std::shared_ptr<const ShootingModel>& shooting() const { return shooting_; }
  std::shared_ptr<const WindowCost> cost(CostContext ctx) const;

  const BucketParams& bucket_params() const { return bucket_; }
  const EcmConfig& ecm_config() const { return ecm_; }
  const std::shared_ptr<const SpmModel>& spm_model() const { return spm_; }

  // Cells and the bounds used when a scenario sets none.
  double cells() const { return shooting_->cells(); }
  double default_control_bound() const { return shooting_->default_control_bound(); }
  // Copy with a different cell count.
  ModelSetup with_cells(double cells) const;

 private:
  ModelKind kind_ = ModelKind::bucket;
  BucketParams bucket_;
  EcmConfig ecm_;
  std::shared_ptr<const SpmModel> spm_;
  std::shared_ptr<const ShootingModel> shooting_;
};

}  // namespace batopt
