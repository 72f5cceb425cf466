#pragma once

#include <span>
#include <string>
#include <vector>

#include "batopt/control_profile.hpp"
#include "batopt/nlp.hpp"

namespace batopt {

enum class SolveStatus { optimal, max_iter, infeasible };
std::string to_string(SolveStatus s);

struct SolverOptions {
  double kkt_tol = 1e-6;   // relative to the initial objective gradient
  double feas_tol = 1e-8;  // states in units of their scale, voltages in volts
  int max_iter = 3000;
  bool verbose = false;
};

struct SolveReport {
  SolveStatus status = SolveStatus::infeasible;
  double objective = 0.0;         // EUR, maximised
  double revenue = 0.0;           // EUR
  double degradation_cost = 0.0;  // EUR, model estimate
  double max_defect = 0.0;
  double max_violation = 0.0;
  double kkt = 0.0;
  int iterations = 0;
  double wall_s = 0.0;
  std::string message;
};

struct OcpSolution {
  ControlProfile profile;
  std::vector<double> w;  // NLP variables; nodes from integrating the profile
  SolveReport report;
};

// Sequential quadratic programming in the space of controls. Node states are
// eliminated by integrating each iterate, so every iterate has zero defects;
// the QP subproblem uses the condensed block Jacobians and a damped BFGS
// Hessian and is solved by a primal-dual interior point method.
OcpSolution solve_nlp(const NlpInstance& nlp, const SolverOptions& opt = {},
                      std::span<const double> u_guess = {});

}  // namespace batopt
