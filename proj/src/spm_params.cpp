#include "batopt/spm_params.hpp"

#include <cmath>
#include <string>

#include "batopt/errors.hpp"

namespace batopt {

namespace {

void check_electrode(const ElectrodeParams& e, const std::string& name) {
  auto positive = [&](double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError(name + "." + field + " must be positive and finite");
  };
  positive(e.radius, "radius");
  positive(e.c_max, "c_max");
  positive(e.diffusivity_ref, "diffusivity_ref");
  positive(e.rate_ref, "rate_ref");
  positive(e.specific_area, "specific_area");
  positive(e.area, "area");
  if (!std::isfinite(e.diffusivity_activation) || !std::isfinite(e.rate_activation))
    throw ConfigError(name + " activation energies must be finite");
  if (std::abs(e.specific_area * e.radius / 3.0 - 1.0) > 1e-6)
    throw ConfigError(name + ".specific_area must equal 3 / radius for spherical particles");
  if (e.ocv.empty()) throw ConfigError(name + " OCV table missing");
  if (!e.ocv.nonincreasing_values() || !(e.ocv.y().front() > e.ocv.y().back()))
    throw ConfigError(name + " OCV must decrease with stoichiometry");
}

}  // namespace

void SpmParams::validate() const {
  check_electrode(pos, "pos");
  check_electrode(neg, "neg");
  if (!(alpha_ct > 0.0 && alpha_ct < 1.0)) throw ConfigError("alpha_ct must lie in (0, 1)");
  if (!(electrons > 0.0)) throw ConfigError("electrons must be positive");
  if (!(c_electrolyte > 0.0)) throw ConfigError("c_electrolyte must be positive");
  if (!(r_batt >= 0.0) || !(r_sei >= 0.0)) throw ConfigError("resistances must be non-negative");
  if (!(sei.electrons > 0.0) || !(sei.rate_ref > 0.0) || !(sei.diffusivity_ref > 0.0) ||
      !(sei.molar_mass > 0.0) || !(sei.density > 0.0) || !(sei.initial_thickness > 0.0))
    throw ConfigError("SEI parameters must be positive");
  const auto& t = thermal;
  if (!(t.density > 0.0) || !(t.volume > 0.0) || !(t.heat_capacity > 0.0) || !(t.h >= 0.0) ||
      !(t.area > 0.0) || !(t.t_env > 0.0) || !(t.t_ref > 0.0))
    throw ConfigError("thermal parameters must be positive");
  if (!(faraday > 0.0) || !(gas_constant > 0.0)) throw ConfigError("constants must be positive");
  if (!(v_min < v_max)) throw ConfigError("voltage limits inverted");
  if (!(cells >= 1.0)) throw ConfigError("cell count must be >= 1");
  if (!(nominal_capacity_ah > 0.0)) throw ConfigError("nominal capacity must be positive");
  double qp = pos.capacity_ah(faraday), qn = neg.capacity_ah(faraday);
  if (!(cyclable_lithium_ah > 0.0) || cyclable_lithium_ah >= qp + qn)
    throw ConfigError("cyclable lithium inconsistent with electrode capacities");
}

}  // namespace batopt
