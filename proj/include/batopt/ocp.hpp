#pragma once

#include <span>

#include "batopt/control_profile.hpp"
#include "batopt/lp.hpp"
#include "batopt/nlp.hpp"
#include "batopt/sqp_solver.hpp"

namespace batopt {

// Exact LP for the bucket model with epigraph variables for |P| and max|P|.
// Throws ConfigError when the power bound is not finite.
OcpSolution solve_bucket_lp(const OcpSpec& spec, const LpOptions& opt = {});

// Bucket specs go to the LP, the others to the SQP.
OcpSolution solve_ocp(const OcpSpec& spec, const SolverOptions& opt = {},
                      std::span<const double> u_guess = {});

struct ProfileEconomics {
  double revenue = 0.0;  // EUR
  double cost = 0.0;     // EUR, model degradation estimate
  double profit = 0.0;
  double max_violation = 0.0;
};

// Rolls the profile out from the spec's initial state and prices it under the
// spec's model. The bucket cost is the exact non-smooth expression.
ProfileEconomics evaluate_profile(const OcpSpec& spec, const ControlProfile& profile);

}  // namespace batopt
