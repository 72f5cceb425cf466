#pragma once

#include "batopt/kinetics.hpp"
#include "batopt/table.hpp"

namespace batopt {

struct ElectrodeParams {
  double radius = 5e-6;                 // m
  double c_max = 51765.0;               // mol m^-3
  double diffusivity_ref = 1e-14;       // m^2 s^-1
  double diffusivity_activation = 0.0;  // J mol^-1
  double rate_ref = 2e-11;
  double rate_activation = 0.0;         // J mol^-1
  double specific_area = 6e5;           // m^2 m^-3, equals 3 / radius for spherical particles
  double area = 1.88;                   // m^2
  Table1d ocv;                          // stoichiometry -> V, monotone cubic

  double volume() const { return area / specific_area; }
  double capacity_ah(double faraday = kFaraday) const { return volume() * c_max * faraday / 3600.0; }
};

struct ThermalParams {
  double density = 2500.0;        // kg m^-3
  double volume = 1.4e-5;         // m^3
  double heat_capacity = 1000.0;  // J kg^-1 K^-1
  double h = 20.0;                // W m^-2 K^-1
  double area = 4.2e-3;           // m^2
  double t_env = 298.15;          // K
  double t_ref = 298.15;          // K
};

struct SpmParams {
  ElectrodeParams pos;
  ElectrodeParams neg;
  double alpha_ct = 0.5;
  double electrons = 1.0;
  double c_electrolyte = 1000.0;  // mol m^-3
  double entropic_coeff = -1e-4;  // V K^-1
  double r_batt = 0.01;           // Ohm
  double r_sei = 2e5;             // Ohm m^-1
  SeiParams sei;
  ThermalParams thermal;
  double faraday = kFaraday;
  double gas_constant = kGasConstant;
  double v_min = 2.7;
  double v_max = 4.2;
  double cells = 750.0;
  double degradation_cost_per_ah = 1.2;
  double nominal_capacity_ah = 2.7;
  double cyclable_lithium_ah = 4.04;  // lithium available for cycling in the fresh cell
  bool side_reaction = true;

  void validate() const;
};

}  // namespace batopt
