#include "batopt/bucket.hpp"

#include <cmath>

#include "batopt/errors.hpp"

namespace batopt {

void BucketParams::validate() const {
  if (!(energy_wh > 0.0)) throw ConfigError("bucket energy_wh must be positive");
  if (!(cells >= 1.0)) throw ConfigError("bucket cell count must be >= 1");
  if (!(k_power >= 0.0) || !(k_throughput >= 0.0))
    throw ConfigError("bucket degradation coefficients must be non-negative");
  if (!(degradation_cost_per_wh >= 0.0)) throw ConfigError("degradation cost must be non-negative");
  if (!(power_bound_w > 0.0)) throw ConfigError("bucket power bound must be positive");
  if (!(nominal_voltage > 0.0)) throw ConfigError("bucket nominal voltage must be positive");
}

BucketStepResult bucket_step(BucketState s, double power_w, double dt_s, const BucketParams& p) {
  if (!(dt_s > 0.0)) throw RangeError("bucket_step requires dt > 0");
  BucketStepResult r;
  r.state.soc = s.soc + power_w * (dt_s / 3600.0) / p.energy_wh;
  r.violation = r.state.soc < -kSocTolerance || r.state.soc > 1.0 + kSocTolerance;
  return r;
}

double bucket_lost_capacity(const ControlProfile& profile, const BucketParams& p) {
  if (profile.empty()) return 0.0;
  double max_abs = 0.0, throughput_wh = 0.0;
  for (double v : profile.values) {
    max_abs = std::max(max_abs, std::abs(v));
    throughput_wh += std::abs(v) * profile.interval_s / 3600.0;
  }
  return p.k_power * max_abs + p.k_throughput * throughput_wh;
}

double energy_cash_flow(const ControlProfile& power_w, const PriceSeries& prices, double offset_s,
                        double cells) {
  double end = offset_s + power_w.duration_s();
  if (offset_s < 0.0 || end > prices.horizon_s() + 1e-6)
    throw RangeError("profile extends beyond the price horizon");
  double acc = 0.0;
  for (std::size_t k = 0; k < power_w.size(); ++k) {
    double t0 = offset_s + power_w.interval_s * static_cast<double>(k);
    double t1 = std::min(t0 + power_w.interval_s, prices.horizon_s());
    if (t1 <= t0) continue;
    double price = mean_price(prices, t0, t1);
    acc += power_w.values[k] * price * (t1 - t0) / 3600.0;
  }
  return -cells * acc;
}

double bucket_revenue(const ControlProfile& profile, const PriceSeries& prices,
                      const BucketParams& p) {
  if (profile.empty()) return 0.0;
  if (std::abs(profile.duration_s() - prices.horizon_s()) > 1e-6)
    throw RangeError("profile span " + std::to_string(profile.duration_s()) +
                     " s differs from price span " + std::to_string(prices.horizon_s()) + " s");
  return energy_cash_flow(profile, prices, 0.0, p.cells);
}

}  // namespace batopt
