#pragma once

namespace batopt {

inline constexpr double kFaraday = 96485.33212;
inline constexpr double kGasConstant = 8.314462618;
inline constexpr double kSeiReferencePotential = 0.4;  // V

// ref * exp[(E/R)(1/T - 1/T_ref)]
double arrhenius(double ref_value, double activation_energy, double temperature_k,
                 double reference_temperature_k, double gas_constant = kGasConstant);

// n F k c_s^a c_el^(1-a) (c_max - c_s)^(1-a); throws KineticsError outside [0, c_max].
double exchange_current(double c_surf, double c_max, double c_el, double rate_constant,
                        double alpha_ct, double electrons, double faraday = kFaraday);

// Butler-Volmer current density for an overpotential: j0 [exp(-a f eta) - exp((1-a) f eta)].
double bv_current(double eta, double j0, double temperature_k, double alpha_ct, double electrons,
                  double faraday = kFaraday, double gas_constant = kGasConstant);
double bv_current_derivative(double eta, double j0, double temperature_k, double alpha_ct,
                             double electrons, double faraday = kFaraday,
                             double gas_constant = kGasConstant);

// Inverse of bv_current. Positive J (insertion) gives negative eta.
double bv_overpotential(double current_density, double j0, double temperature_k, double alpha_ct,
                        double electrons, double faraday = kFaraday,
                        double gas_constant = kGasConstant);

struct SeiParams {
  double electrons = 1.0;
  double rate_ref = 1.33e-15;       // mol m^-2 s^-1
  double rate_activation = -55000.0;
  double diffusivity_ref = 8.3e-19;  // lumped transport coefficient, mol m^-1 s^-1
  double diffusivity_activation = -30000.0;
  double molar_mass = 0.162;         // kg mol^-1
  double density = 1690.0;           // kg m^-3
  double initial_thickness = 5e-9;   // m
};

// Side-reaction current density at the negative electrode.
double sei_current(double eta_neg, double ocv_neg, double delta, double temperature_k,
                   const SeiParams& sei, double main_electrons, double reference_temperature_k,
                   double faraday = kFaraday, double gas_constant = kGasConstant);

// Same with the rate constant and transport coefficient already scaled to temperature.
double sei_current_scaled(double eta_neg, double ocv_neg, double delta, double temperature_k,
                          double rate, double transport, double sei_electrons, double main_electrons,
                          double faraday = kFaraday, double gas_constant = kGasConstant);

}  // namespace batopt
