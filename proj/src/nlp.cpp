#include "batopt/nlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "batopt/errors.hpp"

namespace batopt {

namespace {

bool divides(double whole, double part) {
  double q = whole / part;
  return std::abs(q - std::round(q)) < 1e-9 * std::max(1.0, q);
}

}  // namespace

void OcpSpec::validate() const {
  if (!(horizon_s > 0.0)) throw ConfigError("horizon must be positive");
  if (!(interval_s > 0.0) || !divides(horizon_s, interval_s))
    throw ConfigError("horizon is not a multiple of the control interval");
  if (!(step_s > 0.0) || !divides(interval_s, step_s))
    throw ConfigError("control interval is not a multiple of the integration step");
  if (step_s > kMaxStepSeconds + 1e-12) throw ConfigError("integration step exceeds 5 s");
  if (initial_state.size() != static_cast<std::size_t>(model.shooting()->state_dim()))
    throw ConfigError("initial state has the wrong dimension");
  if (price_offset_s < 0.0 || price_offset_s + horizon_s > prices.horizon_s() + 1e-9)
    throw ConfigError("prices do not cover the horizon");
  if (!(control_lower() < control_upper())) throw ConfigError("empty control bounds");
  if (!std::isfinite(control_lower()) || !std::isfinite(control_upper()))
    throw ConfigError("control bounds must be finite");
  if (!(voltage_margin >= 0.0)) throw ConfigError("negative voltage margin");
}

int OcpSpec::intervals() const { return static_cast<int>(std::lround(horizon_s / interval_s)); }
int OcpSpec::steps_per_interval() const { return static_cast<int>(std::lround(interval_s / step_s)); }

double OcpSpec::control_lower() const {
  if (u_min == 0.0 && u_max == 0.0) return -model.default_control_bound();
  return u_min;
}
double OcpSpec::control_upper() const {
  if (u_min == 0.0 && u_max == 0.0) return model.default_control_bound();
  return u_max;
}

NlpInstance::NlpInstance(OcpSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  model_ = spec_.model.shooting();
  cost_ = spec_.model.cost(spec_.cost_context);
  n_ = spec_.intervals();
  steps_ = spec_.steps_per_interval();
  nx_ = model_->state_dim();
  nq_ = model_->quad_dim();
  np_ = model_->path_dim();
  prices_.resize(static_cast<std::size_t>(n_));
  for (int k = 0; k < n_; ++k) {
    double t0 = spec_.price_offset_s + k * spec_.interval_s;
    prices_[static_cast<std::size_t>(k)] = mean_price(spec_.prices, t0, t0 + spec_.interval_s);
  }
  std::vector<double> slo, shi;
  model_->state_bounds(slo, shi);
  scale_ = model_->state_scale();
  lo_.assign(variable_count(), 0.0);
  hi_.assign(variable_count(), 0.0);
  for (int i = 0; i < nx_; ++i) {
    lo_[x_index(0, i)] = spec_.initial_state[static_cast<std::size_t>(i)];
    hi_[x_index(0, i)] = spec_.initial_state[static_cast<std::size_t>(i)];
  }
  for (int k = 1; k <= n_; ++k)
    for (int i = 0; i < nx_; ++i) {
      lo_[x_index(k, i)] = slo[static_cast<std::size_t>(i)];
      hi_[x_index(k, i)] = shi[static_cast<std::size_t>(i)];
    }
  for (int k = 0; k < n_; ++k) {
    lo_[u_index(k)] = spec_.control_lower();
    hi_[u_index(k)] = spec_.control_upper();
  }
}

std::size_t NlpInstance::variable_count() const {
  return static_cast<std::size_t>((n_ + 1) * nx_ + n_);
}
std::size_t NlpInstance::defect_count() const { return static_cast<std::size_t>(n_ * nx_); }
std::size_t NlpInstance::u_index(int k) const { return static_cast<std::size_t>((n_ + 1) * nx_ + k); }

void NlpInstance::path_bounds(std::vector<double>& lo, std::vector<double>& hi) const {
  model_->path_bounds(lo, hi);
}

void NlpInstance::integrate_interval(int k, std::span<const double> w, IntervalResult& r) const {
  try {
    model_->integrate(w.subspan(x_index(k, 0), static_cast<std::size_t>(nx_)), w[u_index(k)],
                      spec_.step_s, steps_, r);
  } catch (const DomainError& e) {
    throw EvaluationError("interval " + std::to_string(k) + ": " + e.what(), x_index(k, 0),
                          u_index(k));
  }
}

NlpEvaluation NlpInstance::evaluate(std::span<const double> w, bool derivatives) const {
  if (w.size() != variable_count()) throw ConfigError("variable vector has the wrong length");
  NlpEvaluation e;
  e.results.resize(static_cast<std::size_t>(n_));
  e.defects.assign(defect_count(), 0.0);
  const double cells = model_->cells();
  for (int k = 0; k < n_; ++k) {
    auto& r = e.results[static_cast<std::size_t>(k)];
    integrate_interval(k, w, r);
    for (int i = 0; i < nx_; ++i)
      e.defects[static_cast<std::size_t>(k * nx_ + i)] = r.x_end[static_cast<std::size_t>(i)] - w[x_index(k + 1, i)];
    e.revenue -= cells * prices_[static_cast<std::size_t>(k)] * r.quad[0];
  }
  WindowView view{*model_, n_, steps_, spec_.step_s, w, e.results};
  CostGradient cg;
  e.cost = cost_->value(view, derivatives ? &cg : nullptr);
  const bool profit = spec_.objective == Objective::profit;
  e.objective = profit ? e.revenue - e.cost : e.revenue;
  if (!derivatives) return e;

  e.jacobians.resize(static_cast<std::size_t>(n_));
  e.gradient.assign(variable_count(), 0.0);
  const double sign = profit ? -1.0 : 0.0;
  for (std::size_t i = 0; i < cg.dx.size(); ++i) e.gradient[i] += sign * cg.dx[i];
  for (int k = 0; k < n_; ++k) e.gradient[u_index(k)] += sign * cg.du[static_cast<std::size_t>(k)];
  const int nin = nx_ + 1;
  for (int k = 0; k < n_; ++k) {
    auto& jac = e.jacobians[static_cast<std::size_t>(k)];
    try {
      model_->jacobian(w.subspan(x_index(k, 0), static_cast<std::size_t>(nx_)), w[u_index(k)],
                       spec_.step_s, steps_, jac);
    } catch (const DomainError& ex) {
      throw EvaluationError("interval " + std::to_string(k) + ": " + ex.what(), x_index(k, 0),
                            u_index(k));
    }
    for (int q = 0; q < nq_; ++q) {
      double dq = sign * cg.dq[static_cast<std::size_t>(k * nq_ + q)];
      if (q == 0) dq -= cells * prices_[static_cast<std::size_t>(k)];
      if (dq == 0.0) continue;
      const double* row = &jac[static_cast<std::size_t>((nx_ + q) * nin)];
      for (int i = 0; i < nx_; ++i) e.gradient[x_index(k, i)] += dq * row[i];
      e.gradient[u_index(k)] += dq * row[nx_];
    }
  }
  return e;
}

double NlpInstance::objective(std::span<const double> w) const { return evaluate(w, false).objective; }

std::vector<double> NlpInstance::gradient(std::span<const double> w) const {
  return evaluate(w, true).gradient;
}

std::vector<double> NlpInstance::defects(std::span<const double> w) const {
  return evaluate(w, false).defects;
}

std::vector<SparseEntry> NlpInstance::defect_jacobian(std::span<const double> w) const {
  std::vector<SparseEntry> out;
  std::vector<double> jac;
  const int nin = nx_ + 1;
  for (int k = 0; k < n_; ++k) {
    model_->jacobian(w.subspan(x_index(k, 0), static_cast<std::size_t>(nx_)), w[u_index(k)],
                     spec_.step_s, steps_, jac);
    for (int i = 0; i < nx_; ++i) {
      std::size_t row = static_cast<std::size_t>(k * nx_ + i);
      for (int j = 0; j < nx_; ++j) {
        double v = jac[static_cast<std::size_t>(i * nin + j)];
        if (v != 0.0) out.push_back({row, x_index(k, j), v});
      }
      double bu = jac[static_cast<std::size_t>(i * nin + nx_)];
      if (bu != 0.0) out.push_back({row, u_index(k), bu});
      out.push_back({row, x_index(k + 1, i), -1.0});
    }
  }
  return out;
}

std::vector<double> NlpInstance::rollout(std::span<const double> u) const {
  if (u.size() != static_cast<std::size_t>(n_)) throw ConfigError("control vector has the wrong length");
  std::vector<double> w(variable_count(), 0.0);
  std::copy(spec_.initial_state.begin(), spec_.initial_state.end(), w.begin());
  for (int k = 0; k < n_; ++k) w[u_index(k)] = u[static_cast<std::size_t>(k)];
  IntervalResult r;
  for (int k = 0; k < n_; ++k) {
    integrate_interval(k, w, r);
    std::copy(r.x_end.begin(), r.x_end.end(), w.begin() + static_cast<std::ptrdiff_t>(x_index(k + 1, 0)));
  }
  return w;
}

std::vector<double> NlpInstance::initial_guess() const {
  return rollout(std::vector<double>(static_cast<std::size_t>(n_), 0.0));
}

std::vector<double> NlpInstance::controls(std::span<const double> w) const {
  auto first = w.begin() + static_cast<std::ptrdiff_t>(u_index(0));
  return {first, first + n_};
}

ControlProfile NlpInstance::control_profile(std::span<const double> w) const {
  ControlProfile p;
  p.kind = model_->control_kind();
  p.interval_s = spec_.interval_s;
  p.values = controls(w);
  return p;
}

double NlpInstance::max_violation(std::span<const double> w, const NlpEvaluation& e) const {
  double v = 0.0;
  for (int k = 1; k <= n_; ++k)
    for (int i = 0; i < nx_; ++i) {
      double x = w[x_index(k, i)];
      double s = scale_[static_cast<std::size_t>(i)];
      v = std::max({v, (lo_[x_index(k, i)] - x) / s, (x - hi_[x_index(k, i)]) / s});
    }
  std::vector<double> plo, phi;
  model_->path_bounds(plo, phi);
  for (const auto& r : e.results)
    for (int j = 0; j < np_; ++j) {
      double p = r.path[static_cast<std::size_t>(j)];
      v = std::max({v, plo[static_cast<std::size_t>(j)] - p, p - phi[static_cast<std::size_t>(j)]});
    }
  return v;
}

OcpSpec make_spec(const ModelSetup& model, Objective objective, const PriceSeries& prices,
                  double initial_soc, double horizon_s) {
  OcpSpec s;
  s.model = model;
  s.objective = objective;
  s.prices = prices;
  s.horizon_s = horizon_s;
  s.initial_state = model.shooting()->initial_state(initial_soc);
  return s;
}

}  // namespace batopt
