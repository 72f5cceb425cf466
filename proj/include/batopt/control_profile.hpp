#pragma once

#include <vector>

namespace batopt {

enum class ControlKind { power_w, current_a };

// Piecewise-constant control, one value per interval. Positive values charge.
struct ControlProfile {
  ControlKind kind = ControlKind::current_a;
  double interval_s = 900.0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
  double duration_s() const { return interval_s * static_cast<double>(values.size()); }
  // Value active at time t (clamped to the last interval at the end point).
  double at(double t_s) const;

  ControlProfile scaled(double c) const;
  ControlProfile slice(std::size_t first, std::size_t count) const;
  void append(const ControlProfile& other);
  // Same profile on a finer grid; interval_s must be an integer multiple of new_interval_s.
  ControlProfile resampled(double new_interval_s) const;
};

// Power profile to current profile at a fixed nominal voltage.
ControlProfile power_to_current(const ControlProfile& power, double nominal_voltage);

}  // namespace batopt
