#include "batopt/shooting_models.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "batopt/errors.hpp"

namespace batopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int sample_index(int j, int steps) { return j * steps / (kPathSamples - 1); }

// sqrt(x^2 + eps^2) and its derivative
inline double sabs(double x, double eps) { return std::sqrt(x * x + eps * eps); }
inline double dsabs(double x, double eps) { return x / std::sqrt(x * x + eps * eps); }

class BucketShooting final : public ShootingModel {
 public:
  explicit BucketShooting(BucketParams p) : p_(std::move(p)) { p_.validate(); }
  ModelKind kind() const override { return ModelKind::bucket; }
  ControlKind control_kind() const override { return ControlKind::power_w; }
  int state_dim() const override { return 1; }
  int quad_dim() const override { return 1; }
  int path_dim() const override { return 0; }

  void integrate(std::span<const double> x0, double u, double dt, int steps,
                 IntervalResult& out) const override {
    double hours = dt * steps / 3600.0;
    out.x_end.assign(1, x0[0] + u * hours / p_.energy_wh);
    out.quad.assign(1, u * hours);
    out.path.clear();
  }

  void jacobian(std::span<const double>, double, double dt, int steps,
                std::vector<double>& jac) const override {
    double hours = dt * steps / 3600.0;
    jac = {1.0, hours / p_.energy_wh, 0.0, hours};
  }

  void state_bounds(std::vector<double>& lo, std::vector<double>& hi) const override {
    lo = {0.0};
    hi = {1.0};
  }
  void path_bounds(std::vector<double>& lo, std::vector<double>& hi) const override {
    lo.clear();
    hi.clear();
  }
  std::vector<double> state_scale() const override { return {1.0}; }
  double default_control_bound() const override { return p_.power_bound_w; }
  std::vector<double> initial_state(double soc) const override { return {soc}; }
  double soc(std::span<const double> x) const override { return x[0]; }
  double cells() const override { return p_.cells; }

 private:
  BucketParams p_;
};

class EcmShooting final : public ShootingModel {
 public:
  explicit EcmShooting(EcmParams p) : p_(std::move(p)) { p_.validate(); }
  ModelKind kind() const override { return ModelKind::ecm; }
  ControlKind control_kind() const override { return ControlKind::current_a; }
  int state_dim() const override { return 2; }
  int quad_dim() const override { return 3; }
  int path_dim() const override { return kPathSamples; }

  void integrate(std::span<const double> x0, double u, double dt, int steps,
                 IntervalResult& out) const override {
    EcmState s{x0[0], x0[1]};
    out.quad.assign(3, 0.0);
    out.path.assign(kPathSamples, 0.0);
    int next = 0;
    for (int i = 0; i < steps; ++i) {
      double v = ecm_voltage(s, u, p_);
      while (next < kPathSamples - 1 && sample_index(next, steps) == i) out.path[next++] = v;
      out.quad[0] += u * v * dt / 3600.0;
      out.quad[1] += v * dt;
      out.quad[2] += v * v * dt;
      s = ecm_step(s, u, dt, p_).state;
    }
    out.path[kPathSamples - 1] = ecm_voltage(s, u, p_);
    out.x_end = {s.soc, s.i_r};
  }

  // Forward sensitivities through the Euler steps; exact for the piecewise-linear OCV
  // away from its breakpoints.
  void jacobian(std::span<const double> x0, double u, double dt, int steps,
                std::vector<double>& jac) const override {
    constexpr int nin = 3;
    const int rows = 2 + 3 + kPathSamples;
    jac.assign(static_cast<std::size_t>(rows * nin), 0.0);
    auto at = [&](int r, int c) -> double& { return jac[static_cast<std::size_t>(r * nin + c)]; };
    const double c1 = dt / (3600.0 * p_.capacity_ah);
    const double kr = dt / p_.time_constant_s();
    EcmState s{x0[0], x0[1]};
    std::array<double, nin> sz{1.0, 0.0, 0.0}, si{0.0, 1.0, 0.0};
    auto voltage_sens = [&](const EcmState& st, std::array<double, nin>& dv) {
      double slope = p_.ocv.derivative(st.soc);
      for (int c = 0; c < nin; ++c) dv[static_cast<std::size_t>(c)] = slope * sz[static_cast<std::size_t>(c)] + p_.r_parallel * si[static_cast<std::size_t>(c)];
      dv[2] += p_.r_series;
    };
    std::array<double, nin> dv{};
    int next = 0;
    for (int i = 0; i < steps; ++i) {
      double v = ecm_voltage(s, u, p_);
      voltage_sens(s, dv);
      while (next < kPathSamples - 1 && sample_index(next, steps) == i) {
        for (int c = 0; c < nin; ++c) at(5 + next, c) = dv[static_cast<std::size_t>(c)];
        ++next;
      }
      for (int c = 0; c < nin; ++c) {
        double d = dv[static_cast<std::size_t>(c)];
        at(2, c) += u * d * dt / 3600.0;
        at(3, c) += d * dt;
        at(4, c) += 2.0 * v * d * dt;
      }
      at(2, 2) += v * dt / 3600.0;
      s = ecm_step(s, u, dt, p_).state;
      sz[2] += c1;
      for (auto& x : si) x *= (1.0 - kr);
      si[2] += kr;
    }
    voltage_sens(s, dv);
    for (int c = 0; c < nin; ++c) {
      at(0, c) = sz[static_cast<std::size_t>(c)];
      at(1, c) = si[static_cast<std::size_t>(c)];
      at(5 + kPathSamples - 1, c) = dv[static_cast<std::size_t>(c)];
    }
  }

  void state_bounds(std::vector<double>& lo, std::vector<double>& hi) const override {
    lo = {0.0, -kInf};
    hi = {1.0, kInf};
  }
  void path_bounds(std::vector<double>& lo, std::vector<double>& hi) const override {
    lo.assign(kPathSamples, p_.v_min);
    hi.assign(kPathSamples, p_.v_max);
  }
  std::vector<double> state_scale() const override { return {1.0, p_.capacity_ah}; }
  double default_control_bound() const override { return p_.capacity_ah; }
  std::vector<double> initial_state(double soc) const override { return {soc, 0.0}; }
  double soc(std::span<const double> x) const override { return x[0]; }
  double cells() const override { return p_.cells; }
  const EcmParams& params() const { return p_; }

 private:
  EcmParams p_;
};

class SpmShooting final : public ShootingModel {
 public:
  explicit SpmShooting(std::shared_ptr<const SpmModel> m) : m_(std::move(m)) {}
  ModelKind kind() const override { return ModelKind::spm; }
  ControlKind control_kind() const override { return ControlKind::current_a; }
  int state_dim() const override { return SpmState::kDim; }
  int quad_dim() const override { return 1; }
  int path_dim() const override { return kPathSamples; }

  void integrate(std::span<const double> x0, double u, double dt, int steps,
                 IntervalResult& out) const override {
    SpmState s = SpmState::from_array(x0);
    const bool sei = m_->params().side_reaction;
    out.quad.assign(1, 0.0);
    out.path.assign(kPathSamples, 0.0);
    int next = 0;
    SpmOperatingPoint op;
    for (int i = 0; i < steps; ++i) {
      s = m_->step(s, u, dt, sei, &op).state;
      while (next < kPathSamples - 1 && sample_index(next, steps) == i) out.path[next++] = op.voltage;
      out.quad[0] += u * op.voltage * dt / 3600.0;
    }
    out.path[kPathSamples - 1] = m_->operating_point(s, u, sei).voltage;
    auto a = s.to_array();
    out.x_end.assign(a.begin(), a.end());
  }

  void state_bounds(std::vector<double>& lo, std::vector<double>& hi) const override {
    const auto& p = m_->params();
    lo.assign(SpmState::kDim, -kInf);
    hi.assign(SpmState::kDim, kInf);
    for (int i = 0; i < SpmState::kNodes; ++i) {
      lo[i] = 0.0;
      hi[i] = p.pos.c_max;
      lo[SpmState::kNodes + i] = 0.0;
      hi[SpmState::kNodes + i] = p.neg.c_max;
    }
  }
  void path_bounds(std::vector<double>& lo, std::vector<double>& hi) const override {
    lo.assign(kPathSamples, m_->params().v_min);
    hi.assign(kPathSamples, m_->params().v_max);
  }
  std::vector<double> state_scale() const override {
    const auto& p = m_->params();
    std::vector<double> s(SpmState::kDim);
    for (int i = 0; i < SpmState::kNodes; ++i) {
      s[i] = p.pos.c_max;
      s[SpmState::kNodes + i] = p.neg.c_max;
    }
    s[2 * SpmState::kNodes] = p.thermal.t_env;
    s[2 * SpmState::kNodes + 1] = p.sei.initial_thickness;
    s[2 * SpmState::kNodes + 2] = 1e-3 * p.nominal_capacity_ah;
    return s;
  }
  double default_control_bound() const override { return m_->params().nominal_capacity_ah; }
  std::vector<double> initial_state(double soc) const override {
    auto a = m_->state_at_soc(soc).to_array();
    return {a.begin(), a.end()};
  }
  double soc(std::span<const double> x) const override { return m_->soc(SpmState::from_array(x)); }
  double cells() const override { return m_->params().cells; }

 private:
  std::shared_ptr<const SpmModel> m_;
};

std::span<const double> control_span(const WindowView& v) {
  const std::size_t nx = static_cast<std::size_t>(v.model.state_dim());
  return v.w.subspan((static_cast<std::size_t>(v.intervals) + 1) * nx, static_cast<std::size_t>(v.intervals));
}

void init_grad(const WindowView& v, CostGradient* g) {
  if (!g) return;
  const std::size_t nx = static_cast<std::size_t>(v.model.state_dim());
  const std::size_t nq = static_cast<std::size_t>(v.model.quad_dim());
  const std::size_t n = static_cast<std::size_t>(v.intervals);
  g->dx.assign((n + 1) * nx, 0.0);
  g->du.assign(n, 0.0);
  g->dq.assign(n * nq, 0.0);
}

class BucketCost final : public WindowCost {
 public:
  explicit BucketCost(BucketParams p) : p_(std::move(p)) {}
  double value(const WindowView& v, CostGradient* g) const override {
    init_grad(v, g);
    auto u = control_span(v);
    const double eps = 1e-6 * p_.power_bound_w;
    const double tau = 1e-3 * p_.power_bound_w;
    const double hours = v.dt * v.steps / 3600.0;
    const double scale = p_.degradation_cost_per_wh * p_.cells;
    double amax = 0.0;
    for (double x : u) amax = std::max(amax, sabs(x, eps));
    double se = 0.0, thr = 0.0;
    for (double x : u) {
      se += std::exp((sabs(x, eps) - amax) / tau);
      thr += sabs(x, eps) * hours;
    }
    double smax = amax + tau * std::log(se);
    if (g) {
      for (std::size_t k = 0; k < u.size(); ++k) {
        double a = sabs(u[k], eps);
        double wsm = std::exp((a - amax) / tau) / se;
        g->du[k] = scale * (p_.k_power * wsm + p_.k_throughput * hours) * dsabs(u[k], eps);
      }
    }
    return scale * (p_.k_power * smax + p_.k_throughput * thr);
  }

 private:
  BucketParams p_;
};

class EcmCost final : public WindowCost {
 public:
  EcmCost(EcmParams p, SchmalstiegParams q, CostContext ctx)
      : p_(std::move(p)), q_(q), ctx_(ctx) {}

  double value(const WindowView& v, CostGradient* g) const override {
    init_grad(v, g);
    auto u = control_span(v);
    const int n = v.intervals, steps = v.steps, nx = 2, nq = 3;
    const double dt = v.dt;
    const double T = dt * steps * n;
    const double eps_i = 1e-3 * p_.capacity_ah;
    const double eps_z = 1e-4;
    const double zrate = dt / (3600.0 * p_.capacity_ah);

    double s1 = 0.0, s2 = 0.0;
    for (int k = 0; k < n; ++k) {
      s1 += v.results[k].quad[1];
      s2 += v.results[k].quad[2];
    }
    const double v_mean = s1 / T;
    const double v_rms = std::sqrt(s2 / T);

    // Euler-exact SoC samples: z_{k,s} = z_k + s * u_k * zrate.
    double zsum = 0.0;
    for (int k = 0; k < n; ++k) {
      double zk = v.w[static_cast<std::size_t>(k * nx)];
      zsum += steps * zk + u[k] * zrate * 0.5 * steps * (steps - 1);
    }
    const double z_mean = zsum / (static_cast<double>(n) * steps);
    double dev = 0.0, wsum = 0.0;
    for (int k = 0; k < n; ++k) {
      double zk = v.w[static_cast<std::size_t>(k * nx)];
      for (int s = 0; s < steps; ++s) {
        double d = zk + s * u[k] * zrate - z_mean;
        dev += sabs(d, eps_z);
        wsum += dsabs(d, eps_z);
      }
    }
    const double total = static_cast<double>(n) * steps;
    const double soc_dev = 2.0 * dev / total;

    double q = 0.0;
    for (double x : u) q += sabs(x, eps_i) * dt * steps / 3600.0;

    const double d = q_.scale_divisor;
    const double E = p_.capacity_ah;
    const double t0 = ctx_.age_s / q_.time_unit_s;
    const double t1 = (ctx_.age_s + T) / q_.time_unit_s;
    const double cal = std::pow(t1, 0.75) - std::pow(t0, 0.75);
    const double cyc = std::sqrt(ctx_.throughput_ah + q) - std::sqrt(ctx_.throughput_ah);
    const double alpha = schmalstieg_alpha(v_mean, p_.temperature_k, q_);
    const double beta = schmalstieg_beta(v_rms, soc_dev, q_);
    const double price = p_.degradation_cost_per_ah * p_.cells;
    const double loss = (alpha / d) * cal * E + (beta / d) * cyc * E;

    if (g) {
      const double dalpha = alpha > 0.0 ? q_.alpha.v_coeff * q_.alpha.scale *
                                              std::exp(q_.alpha.temp_coeff / p_.temperature_k)
                                        : 0.0;
      const double dC_dvmean = price * (dalpha / d) * cal * E;
      const double dC_dbeta = price * cyc * E / d;
      const double dC_dvrms = dC_dbeta * 2.0 * q_.beta.quad * (v_rms - q_.beta.v_ref);
      const double dC_dsocdev = dC_dbeta * q_.beta.dod;
      const double dC_dq = price * (beta / d) * E * 0.5 / std::sqrt(ctx_.throughput_ah + q);
      for (int k = 0; k < n; ++k) {
        g->dq[static_cast<std::size_t>(k * nq + 1)] = dC_dvmean / T;
        g->dq[static_cast<std::size_t>(k * nq + 2)] = dC_dvrms * 0.5 / (v_rms * T);
        g->du[k] += dC_dq * dsabs(u[k], eps_i) * dt * steps / 3600.0;
      }
      // soc_dev = 2/total * sum sabs(z_ks - z_mean); d z_mean / d z_k = 1/n, / d u_k = zrate (steps-1)/(2n).
      const double c = dC_dsocdev * 2.0 / total;
      for (int k = 0; k < n; ++k) {
        double zk = v.w[static_cast<std::size_t>(k * nx)];
        double gz = 0.0, gu = 0.0;
        for (int s = 0; s < steps; ++s) {
          double wd = dsabs(zk + s * u[k] * zrate - z_mean, eps_z);
          gz += wd;
          gu += wd * s * zrate;
        }
        gz -= wsum / n;
        gu -= wsum * zrate * 0.5 * (steps - 1) / n;
        g->dx[static_cast<std::size_t>(k * nx)] += c * gz;
        g->du[k] += c * gu;
      }
    }
    return price * loss;
  }

 private:
  EcmParams p_;
  SchmalstiegParams q_;
  CostContext ctx_;
};

class SpmCost final : public WindowCost {
 public:
  explicit SpmCost(const SpmParams& p) : price_(p.degradation_cost_per_ah * p.cells) {}
  double value(const WindowView& v, CostGradient* g) const override {
    init_grad(v, g);
    const std::size_t nx = SpmState::kDim;
    const std::size_t n = static_cast<std::size_t>(v.intervals);
    const std::size_t li = nx - 1;
    if (g) {
      g->dx[n * nx + li] = price_;
      g->dx[li] = -price_;
    }
    return price_ * (v.w[n * nx + li] - v.w[li]);
  }

 private:
  double price_;
};

}  // namespace

void ShootingModel::jacobian(std::span<const double> x0, double u, double dt, int steps,
                             std::vector<double>& jac) const {
  const int nx = state_dim(), nq = quad_dim(), np = path_dim();
  const int m = nx + nq + np, nin = nx + 1;
  jac.assign(static_cast<std::size_t>(m * nin), 0.0);
  std::vector<double> scale = state_scale();
  std::vector<double> x(x0.begin(), x0.end());
  IntervalResult plus, minus, base;
  bool have_base = false;
  auto flat = [&](const IntervalResult& r, int i) {
    if (i < nx) return r.x_end[i];
    if (i < nx + nq) return r.quad[i - nx];
    return r.path[i - nx - nq];
  };
  const double rel = 6e-6;
  for (int j = 0; j < nin; ++j) {
    double& var = j < nx ? x[j] : u;
    double typical = j < nx ? scale[j] : default_control_bound();
    double h = rel * std::max(std::abs(var), typical);
    double orig = var;
    bool ok_plus = true, ok_minus = true;
    var = orig + h;
    try { integrate(x, u, dt, steps, plus); } catch (const DomainError&) { ok_plus = false; }
    var = orig - h;
    try { integrate(x, u, dt, steps, minus); } catch (const DomainError&) { ok_minus = false; }
    var = orig;
    if (ok_plus && ok_minus) {
      for (int i = 0; i < m; ++i) jac[i * nin + j] = (flat(plus, i) - flat(minus, i)) / (2 * h);
      continue;
    }
    if (!have_base) {
      integrate(x, u, dt, steps, base);
      have_base = true;
    }
    if (ok_plus) {
      for (int i = 0; i < m; ++i) jac[i * nin + j] = (flat(plus, i) - flat(base, i)) / h;
    } else if (ok_minus) {
      for (int i = 0; i < m; ++i) jac[i * nin + j] = (flat(base, i) - flat(minus, i)) / h;
    } else {
      throw DomainError("finite-difference perturbation failed on both sides");
    }
  }
}

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::bucket: return "bucket";
    case ModelKind::ecm: return "ecm";
    case ModelKind::spm: return "spm";
  }
  return "?";
}

std::string to_string(Objective o) { return o == Objective::revenue ? "revenue" : "profit"; }

ModelKind parse_model_kind(const std::string& s) {
  if (s == "bucket") return ModelKind::bucket;
  if (s == "ecm") return ModelKind::ecm;
  if (s == "spm") return ModelKind::spm;
  throw ConfigError("unknown model '" + s + "' (expected bucket, ecm or spm)");
}

Objective parse_objective(const std::string& s) {
  if (s == "revenue") return Objective::revenue;
  if (s == "profit") return Objective::profit;
  throw ConfigError("unknown objective '" + s + "' (expected revenue or profit)");
}

std::shared_ptr<const ShootingModel> make_bucket_shooting(const BucketParams& p) {
  return std::make_shared<BucketShooting>(p);
}
std::shared_ptr<const ShootingModel> make_ecm_shooting(const EcmParams& p) {
  return std::make_shared<EcmShooting>(p);
}
std::shared_ptr<const ShootingModel> make_spm_shooting(std::shared_ptr<const SpmModel> model) {
  return std::make_shared<SpmShooting>(std::move(model));
}
std::shared_ptr<const WindowCost> make_bucket_cost(const BucketParams& p) {
  return std::make_shared<BucketCost>(p);
}
std::shared_ptr<const WindowCost> make_ecm_cost(const EcmParams& p, const SchmalstiegParams& q,
                                                CostContext ctx) {
  return std::make_shared<EcmCost>(p, q, ctx);
}
std::shared_ptr<const WindowCost> make_spm_cost(const SpmParams& p) {
  return std::make_shared<SpmCost>(p);
}

ModelSetup ModelSetup::bucket(BucketParams p) {
  ModelSetup s;
  s.kind_ = ModelKind::bucket;
  s.bucket_ = std::move(p);
  s.shooting_ = make_bucket_shooting(s.bucket_);
  return s;
}

ModelSetup ModelSetup::ecm(EcmConfig c) {
  ModelSetup s;
  s.kind_ = ModelKind::ecm;
  s.ecm_ = std::move(c);
  s.shooting_ = make_ecm_shooting(s.ecm_.ecm);
  return s;
}

ModelSetup ModelSetup::spm(SpmParams p) {
  ModelSetup s;
  s.kind_ = ModelKind::spm;
  s.spm_ = std::make_shared<SpmModel>(std::move(p));
  s.shooting_ = make_spm_shooting(s.spm_);
  return s;
}

std::shared_ptr<const WindowCost> ModelSetup::cost(CostContext ctx) const {
  switch (kind_) {
    case ModelKind::bucket: return make_bucket_cost(bucket_);
    case ModelKind::ecm: return make_ecm_cost(ecm_.ecm, ecm_.schmalstieg, ctx);
    case ModelKind::spm: return make_spm_cost(spm_->params());
  }
  throw ConfigError("unknown model");
}

ModelSetup ModelSetup::with_cells(double cells) const {
  switch (kind_) {
    case ModelKind::bucket: {
      BucketParams p = bucket_;
      p.cells = cells;
      return bucket(p);
    }
    case ModelKind::ecm: {
      EcmConfig c = ecm_;
      c.ecm.cells = cells;
      return ecm(c);
    }
    case ModelKind::spm: {
      SpmParams p = spm_->params();
      p.cells = cells;
      return spm(p);
    }
  }
  throw ConfigError("unknown model");
}

}  // namespace batopt
