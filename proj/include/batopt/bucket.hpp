#pragma once

#include "batopt/control_profile.hpp"
#include "batopt/market_data.hpp"

namespace batopt {

struct BucketState {
  double soc = 0.5;
};

struct BucketParams {
  double energy_wh = 2.7 * 3.64;
  double cells = 750.0;
  double degradation_cost_per_wh = 0.33;
  double k_power = 2.15e-4;       // Wh per W
  double k_throughput = 1.25e-5;  // Wh per Wh
  double power_bound_w = 2.7 * 3.64;
  double nominal_voltage = 3.64;  // V, used to express power as current

  void validate() const;
};

struct BucketStepResult {
  BucketState state;
  bool violation = false;
};

inline constexpr double kSocTolerance = 1e-9;

BucketStepResult bucket_step(BucketState s, double power_w, double dt_s, const BucketParams& p);

// Per-cell lost capacity in Wh for a power profile.
double bucket_lost_capacity(const ControlProfile& profile, const BucketParams& p);

// Cash flow of the pack, -N * integral(P * price). Charging costs money.
double bucket_revenue(const ControlProfile& profile, const PriceSeries& prices,
                      const BucketParams& p);

// Cash flow of a per-cell profile that starts `offset_s` into the price series.
double energy_cash_flow(const ControlProfile& power_w, const PriceSeries& prices, double offset_s,
                        double cells);

}  // namespace batopt
