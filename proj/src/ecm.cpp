#include "batopt/ecm.hpp"

#include <cmath>

#include "batopt/bucket.hpp"
#include "batopt/errors.hpp"

namespace batopt {

void EcmParams::validate() const {
  if (!(capacity_ah > 0.0)) throw ConfigError("ECM capacity must be positive");
  if (!(r_series > 0.0) || !(r_parallel > 0.0) || !(c_parallel > 0.0))
    throw ConfigError("ECM R_s, R_p, C_p must be positive");
  if (ocv.empty()) throw ConfigError("ECM OCV table missing");
  if (!ocv.strictly_increasing_values()) throw ConfigError("ECM OCV table must increase with soc");
  if (!(v_min < v_max)) throw ConfigError("ECM voltage limits inverted");
  if (!(cells >= 1.0)) throw ConfigError("ECM cell count must be >= 1");
  if (!(temperature_k > 0.0)) throw ConfigError("ECM temperature must be positive");
}

EcmStepResult ecm_step(EcmState s, double current_a, double dt_s, const EcmParams& p) {
  if (!(dt_s > 0.0) || dt_s > kMaxStepSeconds * (1 + 1e-12))
    throw RangeError("ecm_step requires 0 < dt <= 5 s");
  EcmStepResult r;
  r.state.soc = s.soc + current_a * dt_s / (3600.0 * p.capacity_ah);
  r.state.i_r = s.i_r + dt_s * (current_a - s.i_r) / p.time_constant_s();
  r.violation = r.state.soc < -kSocTolerance || r.state.soc > 1.0 + kSocTolerance;
  return r;
}

double ecm_voltage(EcmState s, double current_a, const EcmParams& p) {
  return p.ocv(s.soc) + p.r_parallel * s.i_r + p.r_series * current_a;
}

void SchmalstiegParams::validate() const {
  if (!(scale_divisor > 0.0)) throw ConfigError("Schmalstieg scale_divisor must be positive");
  if (!(time_unit_s > 0.0)) throw ConfigError("Schmalstieg time unit must be positive");
}

double schmalstieg_alpha(double v_mean, double temperature_k, const SchmalstiegParams& q) {
  const auto& a = q.alpha;
  double v = (a.v_coeff * v_mean + a.v_offset) * a.scale * std::exp(a.temp_coeff / temperature_k);
  return std::max(0.0, v);
}

double schmalstieg_beta(double v_rms, double soc_dev, const SchmalstiegParams& q) {
  const auto& b = q.beta;
  double dv = v_rms - b.v_ref;
  return b.quad * dv * dv + b.offset + b.dod * soc_dev;
}

namespace {

void check_stats(const ProfileStats& s) {
  if (!(s.duration_s >= 0.0)) throw DomainError("negative duration");
  if (!(s.throughput_ah >= 0.0)) throw DomainError("negative charge throughput");
  if (!(s.temperature_k > 0.0)) throw DomainError("non-positive temperature");
  if (!(s.soc_dev >= 0.0)) throw DomainError("negative soc deviation");
}

}  // namespace

double schmalstieg_lost_capacity(const ProfileStats& stats, const EcmParams& p,
                                 const SchmalstiegParams& q) {
  check_stats(stats);
  double d = q.scale_divisor;
  double a = schmalstieg_alpha(stats.v_mean, stats.temperature_k, q);
  double b = schmalstieg_beta(stats.v_rms, stats.soc_dev, q);
  double age = stats.duration_s / q.time_unit_s;
  return (a / d) * std::pow(age, 0.75) * p.capacity_ah +
         (b / d) * std::sqrt(stats.throughput_ah) * p.capacity_ah;
}

double schmalstieg_window_loss(const ProfileStats& window, double age_before_s,
                               double throughput_before_ah, const EcmParams& p,
                               const SchmalstiegParams& q) {
  check_stats(window);
  if (age_before_s < 0.0 || throughput_before_ah < 0.0) throw DomainError("negative history");
  double d = q.scale_divisor;
  double a = schmalstieg_alpha(window.v_mean, window.temperature_k, q);
  double b = schmalstieg_beta(window.v_rms, window.soc_dev, q);
  double t0 = age_before_s / q.time_unit_s;
  double t1 = (age_before_s + window.duration_s) / q.time_unit_s;
  double cal = std::pow(t1, 0.75) - std::pow(t0, 0.75);
  double cyc = std::sqrt(throughput_before_ah + window.throughput_ah) - std::sqrt(throughput_before_ah);
  return (a / d) * cal * p.capacity_ah + (b / d) * cyc * p.capacity_ah;
}

ProfileStats profile_stats(std::span<const double> soc, std::span<const double> voltage,
                           std::span<const double> current, double temperature_k,
                           double duration_s) {
  if (soc.empty() || voltage.empty() || current.empty())
    throw DomainError("profile_stats needs non-empty trajectories");
  if (soc.size() != voltage.size() || soc.size() != current.size())
    throw DomainError("profile_stats trajectories are not aligned");
  if (!(duration_s > 0.0)) throw DomainError("profile_stats needs a positive duration");
  const double n = static_cast<double>(soc.size());
  const double dt = duration_s / n;
  double sv = 0.0, sv2 = 0.0, sz = 0.0, si = 0.0;
  for (std::size_t i = 0; i < soc.size(); ++i) {
    sv += voltage[i];
    sv2 += voltage[i] * voltage[i];
    sz += soc[i];
    si += std::abs(current[i]);
  }
  ProfileStats s;
  s.v_mean = sv / n;
  s.v_rms = std::sqrt(sv2 / n);
  double z_mean = sz / n;
  double dev = 0.0;
  for (double z : soc) dev += std::abs(z_mean - z);
  s.soc_dev = 2.0 * dev / n;
  s.temperature_k = temperature_k;
  s.duration_s = duration_s;
  s.throughput_ah = si * dt / 3600.0;
  return s;
}

}  // namespace batopt
