#pragma once

#include <string>
#include <vector>

#include "batopt/control_profile.hpp"
#include "batopt/market_data.hpp"
#include "batopt/spm_model.hpp"

namespace batopt {

enum class PlaybackMode { rescale, voltage_hold };
std::string to_string(PlaybackMode m);
PlaybackMode parse_playback_mode(const std::string& s);

inline constexpr double kReplayStep = 5.0;

struct ReplayTrace {
  SpmState final_state;
  std::vector<std::string> violations;  // empty when safe
  double v_lowest = 0.0;
  double v_highest = 0.0;
};

// Integrates a current profile through the SPM with the side reaction on.
// Stops at the first violation when `stop_early`.
ReplayTrace replay(const ControlProfile& current, const SpmModel& model, const SpmState& x0,
                   bool stop_early = true);

struct RescaleResult {
  ControlProfile profile;
  double factor = 1.0;
};

// Largest c in (0, 1] (bisection to 1e-3) whose replay respects the voltage
// and concentration limits. Throws DegenerateProfileError if c = 1e-3 fails.
RescaleResult rescale_profile(const ControlProfile& current, const SpmModel& model, const SpmState& x0);

struct HoldResult {
  ControlProfile executed;  // one value per 5 s step
  std::vector<double> voltage;
  int held_steps = 0;
  SpmState final_state;
};

// Replaces the requested current with the one holding V on the limit whenever
// the request would cross it. Throws ReplayError when the root find fails.
HoldResult voltage_hold_playback(const ControlProfile& current, const SpmModel& model, const SpmState& x0);

struct LedgerReport {
  PlaybackMode mode = PlaybackMode::rescale;
  double revenue = 0.0;           // EUR
  double degradation_cost = 0.0;  // EUR
  double profit = 0.0;
  double capacity_before_ah = 0.0;
  double capacity_after_ah = 0.0;
  double lost_capacity_ah = 0.0;
  double lost_capacity_pct = 0.0;
  double lost_lithium_ah = 0.0;
  double scale_factor = 1.0;
  std::vector<std::string> violations;
  std::vector<double> hourly_soc;      // start of each hour plus the end
  std::vector<double> hourly_revenue;  // cumulative, end of each hour
};

// Prices the executed current profile through the SPM. Throws ReplayError if
// the replay is not violation-free.
LedgerReport account(const ControlProfile& executed, const PriceSeries& prices, double offset_s,
                     const SpmModel& model, const SpmState& x0, double lambda_per_ah, double cells);

// Safety pass in the given mode followed by accounting. Power profiles are
// converted to current at `nominal_voltage`.
LedgerReport validate_profile(const ControlProfile& profile, PlaybackMode mode, const PriceSeries& prices,
                              double offset_s, const SpmModel& model, const SpmState& x0,
                              double nominal_voltage);

}  // namespace batopt
