#pragma once

#include <Eigen/Dense>

namespace batopt {

// minimise c'x  s.t.  A x <= b,  lo <= x <= hi.
// lo must be finite and the point x = lo must satisfy A x <= b.
struct LpProblem {
  Eigen::VectorXd c;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;  // may hold +inf
};

enum class LpStatus { optimal, unbounded, iteration_limit };

struct LpOptions {
  double feas_tol = 1e-9;
  double opt_tol = 1e-9;
  int max_iter = 50000;
  int refactor_every = 64;
};

struct LpResult {
  LpStatus status = LpStatus::iteration_limit;
  Eigen::VectorXd x;
  Eigen::VectorXd y;  // row duals, <= 0 for the minimisation
  double objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;  // |primal - dual| / max(1, |primal|)
  int iterations = 0;
};

// Bounded-variable primal simplex started from the slack basis. Dantzig
// pricing, Bland's rule after a run of degenerate pivots.
LpResult solve_lp(const LpProblem& lp, const LpOptions& opt = {});

}  // namespace batopt
