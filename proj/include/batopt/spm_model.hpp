#pragma once

#include <array>
#include <span>

#include "batopt/chebyshev.hpp"
#include "batopt/spm_params.hpp"

namespace batopt {

struct SpmState {
  static constexpr int kNodes = 5;
  static constexpr int kDim = 2 * kNodes + 3;

  std::array<double, kNodes> c_pos{};  // mol m^-3, surface side first
  std::array<double, kNodes> c_neg{};
  double temperature = 298.15;        // K
  double sei_thickness = 5e-9;        // m
  double lost_lithium_ah = 0.0;       // Ah

  std::array<double, kDim> to_array() const;
  static SpmState from_array(std::span<const double> x);
};

// Algebraic quantities at one state and applied current (positive charges).
struct SpmOperatingPoint {
  double temperature = 0.0;
  double diffusivity_pos = 0.0, diffusivity_neg = 0.0;
  double c_surf_pos = 0.0, c_surf_neg = 0.0;
  double ocv_pos = 0.0, ocv_neg = 0.0;
  double j0_pos = 0.0, j0_neg = 0.0;
  double eta_pos = 0.0, eta_neg = 0.0;
  double intercalation_neg = 0.0;  // A m^-2, insertion positive
  double i_sei = 0.0;              // A m^-2
  double voltage = 0.0;            // V
};

struct SpmStepResult {
  SpmState state;
  bool violation = false;
};

class SpmModel {
 public:
  explicit SpmModel(SpmParams params);

  const SpmParams& params() const { return p_; }
  const ChebDisc& disc_pos() const { return disc_pos_; }
  const ChebDisc& disc_neg() const { return disc_neg_; }

  // Throws KineticsError when a surface concentration leaves (0, c_max).
  SpmOperatingPoint operating_point(const SpmState& s, double current_a, bool side_reaction) const;

  SpmState rhs(const SpmState& s, double current_a) const;
  SpmState rhs(const SpmState& s, double current_a, bool side_reaction,
               SpmOperatingPoint* op = nullptr) const;

  // Forward Euler, dt <= 5 s.
  SpmStepResult step(const SpmState& s, double current_a, double dt_s) const;
  SpmStepResult step(const SpmState& s, double current_a, double dt_s, bool side_reaction,
                     SpmOperatingPoint* op = nullptr) const;

  double voltage(const SpmState& s, double current_a) const;

  // Concentrations within [0, c_max] up to tol * c_max.
  bool concentrations_valid(const SpmState& s, double tol = 1e-9) const;

  double electrode_lithium_ah(const SpmState& s, bool positive) const;
  double particle_lithium_ah(const SpmState& s) const;

  // Fresh-cell stoichiometry window of the positive electrode at 4.2 V and 2.7 V.
  double pos_stoich_full() const { return y_full_; }
  double pos_stoich_empty() const { return y_empty_; }
  double soc(const SpmState& s) const;
  SpmState state_at_soc(double soc) const;

  // C/25 charge to v_max, 1 h rest, C/25 discharge to v_min; side reaction off.
  double measure_capacity(const SpmState& s) const;

  // Largest explicit step that keeps the diffusion stencil stable at temperature T.
  double max_stable_step(double temperature_k) const;

 private:
  double solve_neg_overpotential(double target, double j0, double temperature, double ocv_neg,
                                 double sei_rate, double sei_transport, double delta,
                                 bool side_reaction, double& i_sei) const;

  SpmParams p_;
  ChebDisc disc_pos_;
  ChebDisc disc_neg_;
  double rho_pos_ = 0.0;  // spectral radius of the Laplacian, m^-2
  double rho_neg_ = 0.0;
  double y_full_ = 0.0;
  double y_empty_ = 0.0;
};

SpmState spm_rhs(const SpmState& s, double current_a, const SpmModel& model);
SpmStepResult spm_step(const SpmState& s, double current_a, double dt_s, const SpmModel& model);
double spm_voltage(const SpmState& s, double current_a, const SpmModel& model);
double measure_capacity(const SpmState& s, const SpmModel& model);

}  // namespace batopt
