#include "batopt/control_profile.hpp"

#include <cmath>

#include "batopt/errors.hpp"

namespace batopt {

double ControlProfile::at(double t_s) const {
  if (values.empty()) return 0.0;
  if (t_s < 0.0 || t_s > duration_s() * (1 + 1e-12)) throw RangeError("time outside control profile");
  auto k = static_cast<std::size_t>(std::floor(t_s / interval_s));
  if (k >= values.size()) k = values.size() - 1;
  return values[k];
}

ControlProfile ControlProfile::scaled(double c) const {
  ControlProfile out = *this;
  for (double& v : out.values) v *= c;
  return out;
}

ControlProfile ControlProfile::slice(std::size_t first, std::size_t count) const {
  if (first + count > values.size()) throw RangeError("control slice outside profile");
  ControlProfile out{kind, interval_s, {}};
  out.values.assign(values.begin() + static_cast<std::ptrdiff_t>(first),
                    values.begin() + static_cast<std::ptrdiff_t>(first + count));
  return out;
}

void ControlProfile::append(const ControlProfile& other) {
  if (other.empty()) return;
  if (!values.empty() && (other.kind != kind || std::abs(other.interval_s - interval_s) > 1e-9))
    throw ConfigError("cannot append profiles with different kind or interval");
  if (values.empty()) {
    kind = other.kind;
    interval_s = other.interval_s;
  }
  values.insert(values.end(), other.values.begin(), other.values.end());
}

ControlProfile ControlProfile::resampled(double new_interval_s) const {
  double ratio = interval_s / new_interval_s;
  auto m = static_cast<std::size_t>(std::llround(ratio));
  if (m == 0 || std::abs(ratio - static_cast<double>(m)) > 1e-9)
    throw ConfigError("resampling interval must divide the profile interval");
  ControlProfile out{kind, new_interval_s, {}};
  out.values.reserve(values.size() * m);
  for (double v : values)
    for (std::size_t i = 0; i < m; ++i) out.values.push_back(v);
  return out;
}

ControlProfile power_to_current(const ControlProfile& power, double nominal_voltage) {
  if (power.kind != ControlKind::power_w) throw ConfigError("expected a power profile");
  if (!(nominal_voltage > 0.0)) throw ConfigError("nominal voltage must be positive");
  ControlProfile out = power.scaled(1.0 / nominal_voltage);
  out.kind = ControlKind::current_a;
  return out;
}

}  // namespace batopt
