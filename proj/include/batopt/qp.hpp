#pragma once

#include <Eigen/Dense>

namespace batopt {

// min 0.5 d'Hd + g'd  s.t.  lo <= c + A d <= hi,  dlo <= d <= dhi.
// Infinite row bounds are ignored; box bounds must be finite.
struct QpProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  Eigen::MatrixXd A;
  Eigen::VectorXd c;
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  Eigen::VectorXd dlo;
  Eigen::VectorXd dhi;
};

struct QpOptions {
  double tol = 1e-10;  // residuals and mean complementarity, on unit-length rows
  int max_iter = 100;
};

struct QpResult {
  Eigen::VectorXd d;
  Eigen::VectorXd mu;   // row multipliers, positive when the upper bound binds
  Eigen::VectorXd box;  // box multipliers, same sign convention
  double violation = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Primal-dual interior point with Mehrotra predictor-corrector.
QpResult solve_box_qp(const QpProblem& qp, const QpOptions& opt = {});

}  // namespace batopt
