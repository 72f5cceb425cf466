#include "batopt/spm_model.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "batopt/csv.hpp"
#include "batopt/errors.hpp"
#include "batopt/kinetics.hpp"

namespace batopt {

namespace {

constexpr int kN = SpmState::kNodes;

double spectral_radius(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m);
  double r = 0.0;
  for (int i = 0; i < m.rows(); ++i) r = std::max(r, std::abs(es.eigenvalues()(i)));
  return r;
}

}  // namespace

std::array<double, SpmState::kDim> SpmState::to_array() const {
  std::array<double, kDim> x{};
  for (int i = 0; i < kNodes; ++i) {
    x[i] = c_pos[i];
    x[kNodes + i] = c_neg[i];
  }
  x[2 * kNodes] = temperature;
  x[2 * kNodes + 1] = sei_thickness;
  x[2 * kNodes + 2] = lost_lithium_ah;
  return x;
}

SpmState SpmState::from_array(std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(kDim)) throw ConfigError("SPM state needs 13 entries");
  SpmState s;
  for (int i = 0; i < kNodes; ++i) {
    s.c_pos[i] = x[i];
    s.c_neg[i] = x[kNodes + i];
  }
  s.temperature = x[2 * kNodes];
  s.sei_thickness = x[2 * kNodes + 1];
  s.lost_lithium_ah = x[2 * kNodes + 2];
  return s;
}

SpmModel::SpmModel(SpmParams params) : p_(std::move(params)) {
  p_.validate();
  disc_pos_ = cheb_disc(kN, p_.pos.radius);
  disc_neg_ = cheb_disc(kN, p_.neg.radius);
  rho_pos_ = spectral_radius(disc_pos_.laplacian);
  rho_neg_ = spectral_radius(disc_neg_.laplacian);

  // Fresh equilibrium window: OCV_pos(y) - OCV_neg(x(y)) hits the voltage limits.
  const double qp = p_.pos.capacity_ah(p_.faraday), qn = p_.neg.capacity_ah(p_.faraday);
  const double li = p_.cyclable_lithium_ah;
  auto cell_ocv = [&](double y) {
    double x = (li - y * qp) / qn;
    return p_.pos.ocv(y) - p_.neg.ocv(x);
  };
  double lo = std::max(0.0, (li - qn) / qp) + 1e-9;
  double hi = std::min(1.0, li / qp) - 1e-9;
  auto solve = [&](double target) {
    double a = lo, b = hi;
    if (!((cell_ocv(a) - target) > 0.0 && (cell_ocv(b) - target) < 0.0))
      throw ConfigError("electrode balance does not span the voltage window");
    for (int i = 0; i < 200 && b - a > 1e-15; ++i) {
      double m = 0.5 * (a + b);
      if (cell_ocv(m) > target) a = m; else b = m;
    }
    return 0.5 * (a + b);
  };
  y_full_ = solve(p_.v_max);
  y_empty_ = solve(p_.v_min);
}

double SpmModel::solve_neg_overpotential(double target, double j0, double temperature,
                                         double ocv_neg, double sei_rate, double sei_transport,
                                         double delta, bool side_reaction, double& i_sei) const {
  const double a = p_.alpha_ct, n = p_.electrons, F = p_.faraday, R = p_.gas_constant;
  if (!side_reaction) {
    i_sei = 0.0;
    return bv_overpotential(target, j0, temperature, a, n, F, R);
  }
  auto sei = [&](double eta) {
    return sei_current_scaled(eta, ocv_neg, delta, temperature, sei_rate, sei_transport,
                              p_.sei.electrons, n, F, R);
  };
  const double f = n * F / (R * temperature);
  double eta = bv_overpotential(target, j0, temperature, a, n, F, R);
  eta = bv_overpotential(target - sei(eta), j0, temperature, a, n, F, R);
  for (int it = 0; it < 50; ++it) {
    double is = sei(eta);
    double r = bv_current(eta, j0, temperature, a, n, F, R) + is - target;
    double dr = bv_current_derivative(eta, j0, temperature, a, n, F, R) - f * is;
    double step = r / dr;
    eta -= step;
    if (std::abs(r) <= 1e-10 && std::abs(step) <= 1e-13) {
      i_sei = sei(eta);
      return eta;
    }
  }
  throw KineticsError("negative-electrode current split did not converge");
}

SpmOperatingPoint SpmModel::operating_point(const SpmState& s, double current_a,
                                            bool side_reaction) const {
  SpmOperatingPoint op;
  const double T = s.temperature;
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("non-physical temperature");
  const double n = p_.electrons, F = p_.faraday, R = p_.gas_constant, Tref = p_.thermal.t_ref;
  const double a = p_.alpha_ct;
  op.temperature = T;
  op.diffusivity_pos = arrhenius(p_.pos.diffusivity_ref, p_.pos.diffusivity_activation, T, Tref, R);
  op.diffusivity_neg = arrhenius(p_.neg.diffusivity_ref, p_.neg.diffusivity_activation, T, Tref, R);
  const double k_pos = arrhenius(p_.pos.rate_ref, p_.pos.rate_activation, T, Tref, R);
  const double k_neg = arrhenius(p_.neg.rate_ref, p_.neg.rate_activation, T, Tref, R);

  const double j_pos = -current_a / p_.pos.area;  // insertion positive
  const double j_neg_applied = current_a / p_.neg.area;
  op.c_surf_pos = disc_pos_.surface(s.c_pos.data(), j_pos / (n * F), op.diffusivity_pos);
  op.c_surf_neg = disc_neg_.surface(s.c_neg.data(), j_neg_applied / (n * F), op.diffusivity_neg);
  op.j0_pos = exchange_current(op.c_surf_pos, p_.pos.c_max, p_.c_electrolyte, k_pos, a, n, F);
  op.j0_neg = exchange_current(op.c_surf_neg, p_.neg.c_max, p_.c_electrolyte, k_neg, a, n, F);
  op.ocv_pos = p_.pos.ocv(op.c_surf_pos / p_.pos.c_max);
  op.ocv_neg = p_.neg.ocv(op.c_surf_neg / p_.neg.c_max);
  op.eta_pos = bv_overpotential(j_pos, op.j0_pos, T, a, n, F, R);

  double sei_rate = 0.0, sei_transport = 0.0;
  if (side_reaction) {
    if (!(s.sei_thickness > 0.0)) throw DomainError("SEI thickness must be positive");
    sei_rate = arrhenius(p_.sei.rate_ref, p_.sei.rate_activation, T, Tref, R);
    sei_transport = arrhenius(p_.sei.diffusivity_ref, p_.sei.diffusivity_activation, T, Tref, R);
  }
  op.eta_neg = solve_neg_overpotential(j_neg_applied, op.j0_neg, T, op.ocv_neg, sei_rate,
                                       sei_transport, s.sei_thickness, side_reaction, op.i_sei);
  op.intercalation_neg = j_neg_applied - op.i_sei;

  const double i_dis = -current_a;
  op.voltage = op.ocv_pos - op.ocv_neg + (T - Tref) * p_.entropic_coeff -
               (op.eta_neg - op.eta_pos) - (p_.r_batt + p_.r_sei * s.sei_thickness) * i_dis;
  return op;
}

SpmState SpmModel::rhs(const SpmState& s, double current_a) const {
  return rhs(s, current_a, p_.side_reaction, nullptr);
}

SpmState SpmModel::rhs(const SpmState& s, double current_a, bool side_reaction,
                       SpmOperatingPoint* out) const {
  SpmOperatingPoint op = operating_point(s, current_a, side_reaction);
  const double n = p_.electrons, F = p_.faraday;
  SpmState d;
  const double flux_pos = -current_a / (p_.pos.area * n * F);
  const double flux_neg = current_a / (p_.neg.area * n * F);
  const double sink = op.i_sei * p_.neg.specific_area / (n * F);
  for (int j = 0; j < kN; ++j) {
    double lp = 0.0, ln = 0.0;
    for (int k = 0; k < kN; ++k) {
      lp += disc_pos_.laplacian(j, k) * s.c_pos[k];
      ln += disc_neg_.laplacian(j, k) * s.c_neg[k];
    }
    d.c_pos[j] = op.diffusivity_pos * lp + disc_pos_.flux_gain(j) * flux_pos;
    d.c_neg[j] = op.diffusivity_neg * ln + disc_neg_.flux_gain(j) * flux_neg - sink;
  }
  const auto& th = p_.thermal;
  const double i_dis = -current_a;
  const double heat = i_dis * i_dis * p_.r_batt + i_dis * (op.eta_neg - op.eta_pos) +
                      i_dis * s.temperature * p_.entropic_coeff -
                      th.h * th.area * (s.temperature - th.t_env);
  d.temperature = heat / (th.density * th.volume * th.heat_capacity);
  d.sei_thickness = op.i_sei * p_.sei.molar_mass / (p_.sei.electrons * F * p_.sei.density);
  d.lost_lithium_ah = op.i_sei * p_.neg.area / 3600.0;
  if (out) *out = op;
  return d;
}

double SpmModel::max_stable_step(double temperature_k) const {
  const double Tref = p_.thermal.t_ref, R = p_.gas_constant;
  double dp = arrhenius(p_.pos.diffusivity_ref, p_.pos.diffusivity_activation, temperature_k, Tref, R);
  double dn = arrhenius(p_.neg.diffusivity_ref, p_.neg.diffusivity_activation, temperature_k, Tref, R);
  return 2.0 / std::max(dp * rho_pos_, dn * rho_neg_);
}

SpmStepResult SpmModel::step(const SpmState& s, double current_a, double dt_s) const {
  return step(s, current_a, dt_s, p_.side_reaction, nullptr);
}

SpmStepResult SpmModel::step(const SpmState& s, double current_a, double dt_s, bool side_reaction,
                             SpmOperatingPoint* op) const {
  if (!(dt_s > 0.0) || dt_s > 5.0 * (1 + 1e-12)) throw RangeError("spm step requires 0 < dt <= 5 s");
  SpmOperatingPoint local;
  SpmState d = rhs(s, current_a, side_reaction, &local);
  if (dt_s * std::max(local.diffusivity_pos * rho_pos_, local.diffusivity_neg * rho_neg_) > 2.0)
    throw DomainError("explicit diffusion step unstable at T = " + format_double(s.temperature, 6) + " K");
  SpmStepResult r;
  for (int j = 0; j < kN; ++j) {
    r.state.c_pos[j] = s.c_pos[j] + dt_s * d.c_pos[j];
    r.state.c_neg[j] = s.c_neg[j] + dt_s * d.c_neg[j];
  }
  r.state.temperature = s.temperature + dt_s * d.temperature;
  r.state.sei_thickness = s.sei_thickness + dt_s * d.sei_thickness;
  r.state.lost_lithium_ah = s.lost_lithium_ah + dt_s * d.lost_lithium_ah;
  r.violation = !concentrations_valid(r.state);
  if (op) *op = local;
  return r;
}

double SpmModel::voltage(const SpmState& s, double current_a) const {
  return operating_point(s, current_a, p_.side_reaction).voltage;
}

bool SpmModel::concentrations_valid(const SpmState& s, double tol) const {
  for (int j = 0; j < kN; ++j) {
    if (s.c_pos[j] < -tol * p_.pos.c_max || s.c_pos[j] > p_.pos.c_max * (1 + tol)) return false;
    if (s.c_neg[j] < -tol * p_.neg.c_max || s.c_neg[j] > p_.neg.c_max * (1 + tol)) return false;
  }
  return true;
}

double SpmModel::electrode_lithium_ah(const SpmState& s, bool positive) const {
  const auto& e = positive ? p_.pos : p_.neg;
  const auto& disc = positive ? disc_pos_ : disc_neg_;
  const double mean = disc.mean(positive ? s.c_pos.data() : s.c_neg.data());
  return mean * e.volume() * p_.faraday / 3600.0;
}

double SpmModel::particle_lithium_ah(const SpmState& s) const {
  return electrode_lithium_ah(s, true) + electrode_lithium_ah(s, false);
}

double SpmModel::soc(const SpmState& s) const {
  double y = disc_pos_.mean(s.c_pos.data()) / p_.pos.c_max;
  return (y_empty_ - y) / (y_empty_ - y_full_);
}

SpmState SpmModel::state_at_soc(double soc) const {
  const double qp = p_.pos.capacity_ah(p_.faraday), qn = p_.neg.capacity_ah(p_.faraday);
  double y = y_empty_ + soc * (y_full_ - y_empty_);
  double x = (p_.cyclable_lithium_ah - y * qp) / qn;
  if (!(y > 0.0 && y < 1.0 && x > 0.0 && x < 1.0)) throw RangeError("state of charge outside the electrode window");
  SpmState s;
  s.c_pos.fill(y * p_.pos.c_max);
  s.c_neg.fill(x * p_.neg.c_max);
  s.temperature = p_.thermal.t_env;
  s.sei_thickness = p_.sei.initial_thickness;
  s.lost_lithium_ah = 0.0;
  return s;
}

double SpmModel::measure_capacity(const SpmState& start) const {
  const double dt = 5.0;
  const double current = p_.nominal_capacity_ah / 25.0;
  const int max_steps = static_cast<int>(40.0 * 3600.0 / dt);
  SpmState s = start;
  auto v_after = [&](const SpmState& from, double i, double h) {
    return operating_point(step(from, i, h, false).state, i, false).voltage;
  };
  // Run at constant current until the voltage reaches `limit`; the last step is
  // shortened so the end point sits on the limit. Returns the elapsed time.
  auto run_to = [&](double i, double limit, bool rising) -> double {
    auto reached = [&](double v) { return rising ? v >= limit : v <= limit; };
    double elapsed = 0.0;
    if (reached(operating_point(s, i, false).voltage)) return 0.0;
    for (int k = 0; k < max_steps; ++k) {
      double v = v_after(s, i, dt);
      if (!reached(v)) {
        s = step(s, i, dt, false).state;
        elapsed += dt;
        continue;
      }
      double lo = 0.0, hi = dt;
      for (int it = 0; it < 60 && hi - lo > 1e-9; ++it) {
        double mid = 0.5 * (lo + hi);
        if (reached(v_after(s, i, mid))) hi = mid; else lo = mid;
      }
      double h = 0.5 * (lo + hi);
      s = step(s, i, h, false).state;
      return elapsed + h;
    }
    throw MeasurementError("capacity check: voltage never reached " + format_double(limit) +
                           " V within 40 h");
  };
  try {
    run_to(current, p_.v_max, true);
    for (int i = 0; i < static_cast<int>(3600.0 / dt); ++i) s = step(s, 0.0, dt, false).state;
    double t = run_to(-current, p_.v_min, false);
    return current * t / 3600.0;
  } catch (const MeasurementError&) {
    throw;
  } catch (const Error& e) {
    throw MeasurementError(std::string("capacity check failed: ") + e.what() + " (soc " +
                           format_double(soc(s), 6) + ", T " + format_double(s.temperature, 6) + " K)");
  }
}

SpmState spm_rhs(const SpmState& s, double current_a, const SpmModel& model) {
  return model.rhs(s, current_a);
}

SpmStepResult spm_step(const SpmState& s, double current_a, double dt_s, const SpmModel& model) {
  return model.step(s, current_a, dt_s);
}

double spm_voltage(const SpmState& s, double current_a, const SpmModel& model) {
  return model.voltage(s, current_a);
}

double measure_capacity(const SpmState& s, const SpmModel& model) {
  return model.measure_capacity(s);
}

}  // namespace batopt
