#pragma once

#include <span>

#include "batopt/table.hpp"

namespace batopt {

// First-order RC equivalent circuit. Positive current charges; the branch
// current i_r follows the same sign.
struct EcmState {
  double soc = 0.5;
  double i_r = 0.0;
};

struct EcmParams {
  double capacity_ah = 2.7;
  double r_series = 0.035;
  double r_parallel = 0.02;
  double c_parallel = 50000.0;
  Table1d ocv;  // soc -> V, piecewise linear
  double v_min = 2.7;
  double v_max = 4.2;
  double cells = 750.0;
  double degradation_cost_per_ah = 1.2;
  double temperature_k = 298.15;

  void validate() const;
  double time_constant_s() const { return r_parallel * c_parallel; }
};

struct EcmStepResult {
  EcmState state;
  bool violation = false;
};

inline constexpr double kMaxStepSeconds = 5.0;

EcmStepResult ecm_step(EcmState s, double current_a, double dt_s, const EcmParams& p);
double ecm_voltage(EcmState s, double current_a, const EcmParams& p);

struct SchmalstiegParams {
  struct Alpha {
    double v_coeff = 7.543;
    double v_offset = -23.75;
    double scale = 1e6;
    double temp_coeff = -6976.0;
  } alpha;
  struct Beta {
    double quad = 7.348e-3;
    double v_ref = 3.667;
    double offset = 7.6e-4;
    double dod = 4.081e-3;
  } beta;
  double scale_divisor = 5.0;
  double time_unit_s = 86400.0;

  void validate() const;
};

struct ProfileStats {
  double v_mean = 0.0;
  double v_rms = 0.0;
  double soc_dev = 0.0;
  double temperature_k = 298.15;
  double duration_s = 0.0;
  double throughput_ah = 0.0;
};

// Calendar and cycle coefficients; alpha is clipped at zero below its voltage threshold.
double schmalstieg_alpha(double v_mean, double temperature_k, const SchmalstiegParams& q);
double schmalstieg_beta(double v_rms, double soc_dev, const SchmalstiegParams& q);

// Lost capacity (Ah per cell) after `stats.duration_s` of age and `stats.throughput_ah`.
double schmalstieg_lost_capacity(const ProfileStats& stats, const EcmParams& p,
                                 const SchmalstiegParams& q);

// Loss accrued by one window appended to an existing history of age and throughput.
double schmalstieg_window_loss(const ProfileStats& window, double age_before_s,
                               double throughput_before_ah, const EcmParams& p,
                               const SchmalstiegParams& q);

// Uniformly sampled trajectories with left-point quadrature over duration_s.
ProfileStats profile_stats(std::span<const double> soc, std::span<const double> voltage,
                           std::span<const double> current, double temperature_k,
                           double duration_s);

}  // namespace batopt
