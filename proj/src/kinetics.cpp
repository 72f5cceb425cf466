#include "batopt/kinetics.hpp"

#include <cmath>
#include <limits>

#include "batopt/csv.hpp"
#include "batopt/errors.hpp"

namespace batopt {

double arrhenius(double ref_value, double activation_energy, double temperature_k,
                 double reference_temperature_k, double gas_constant) {
  return ref_value *
         std::exp((activation_energy / gas_constant) * (1.0 / temperature_k - 1.0 / reference_temperature_k));
}

double exchange_current(double c_surf, double c_max, double c_el, double rate_constant,
                        double alpha_ct, double electrons, double faraday) {
  if (!(c_surf >= 0.0) || !(c_surf <= c_max))
    throw KineticsError("surface concentration " + format_double(c_surf, 8) +
                        " outside [0, " + format_double(c_max, 8) + "]");
  if (alpha_ct == 0.5)
    return electrons * faraday * rate_constant * std::sqrt(c_surf * c_el * (c_max - c_surf));
  return electrons * faraday * rate_constant * std::pow(c_surf, alpha_ct) *
         std::pow(c_el, 1.0 - alpha_ct) * std::pow(c_max - c_surf, 1.0 - alpha_ct);
}

double bv_current(double eta, double j0, double temperature_k, double alpha_ct, double electrons,
                  double faraday, double gas_constant) {
  double f = electrons * faraday / (gas_constant * temperature_k);
  return j0 * (std::exp(-alpha_ct * f * eta) - std::exp((1.0 - alpha_ct) * f * eta));
}

double bv_current_derivative(double eta, double j0, double temperature_k, double alpha_ct,
                             double electrons, double faraday, double gas_constant) {
  double f = electrons * faraday / (gas_constant * temperature_k);
  return -j0 * f *
         (alpha_ct * std::exp(-alpha_ct * f * eta) + (1.0 - alpha_ct) * std::exp((1.0 - alpha_ct) * f * eta));
}

double bv_overpotential(double current_density, double j0, double temperature_k, double alpha_ct,
                        double electrons, double faraday, double gas_constant) {
  if (!(j0 > 0.0)) throw KineticsError("singular kinetics: exchange current density " +
                                       format_double(j0, 6) + " is not positive");
  const double f = electrons * faraday / (gas_constant * temperature_k);
  if (alpha_ct == 0.5) return -(2.0 / f) * std::asinh(current_density / (2.0 * j0));

  auto residual = [&](double eta) {
    return bv_current(eta, j0, temperature_k, alpha_ct, electrons, faraday, gas_constant) - current_density;
  };
  // residual is strictly decreasing in eta; bracket around the symmetric estimate.
  double guess = -(2.0 / f) * std::asinh(current_density / (2.0 * j0));
  double lo = guess - 0.05, hi = guess + 0.05;
  for (int i = 0; i < 200 && residual(lo) < 0.0; ++i) lo -= (hi - lo);
  for (int i = 0; i < 200 && residual(hi) > 0.0; ++i) hi += (hi - lo);
  const double tol = 1e-12 * j0;
  double eta = guess;
  for (int it = 0; it < 200; ++it) {
    double r = residual(eta);
    if (std::abs(r) <= tol) return eta;
    if (r > 0.0) lo = eta; else hi = eta;
    double d = bv_current_derivative(eta, j0, temperature_k, alpha_ct, electrons, faraday, gas_constant);
    double next = eta - r / d;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo < 4 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(eta))) return next;
    eta = next;
  }
  throw KineticsError("Butler-Volmer inversion did not converge");
}

double sei_current_scaled(double eta_neg, double ocv_neg, double delta, double temperature_k,
                          double rate, double transport, double sei_electrons, double main_electrons,
                          double faraday, double gas_constant) {
  const double rt = gas_constant * temperature_k;
  double numerator = std::exp(-main_electrons * faraday / rt * eta_neg);
  double kinetic = 1.0 / (sei_electrons * faraday * rate *
                          std::exp(-sei_electrons * faraday / rt * (ocv_neg - kSeiReferencePotential)));
  double diffusive = delta / (sei_electrons * faraday * transport);
  return numerator / (kinetic + diffusive);
}

double sei_current(double eta_neg, double ocv_neg, double delta, double temperature_k,
                   const SeiParams& sei, double main_electrons, double reference_temperature_k,
                   double faraday, double gas_constant) {
  if (!(delta > 0.0)) throw DomainError("SEI thickness must be positive");
  double rate = arrhenius(sei.rate_ref, sei.rate_activation, temperature_k, reference_temperature_k, gas_constant);
  double transport = arrhenius(sei.diffusivity_ref, sei.diffusivity_activation, temperature_k,
                               reference_temperature_k, gas_constant);
  return sei_current_scaled(eta_neg, ocv_neg, delta, temperature_k, rate, transport, sei.electrons,
                            main_electrons, faraday, gas_constant);
}

}  // namespace batopt
