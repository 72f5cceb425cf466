#include "batopt/chebyshev.hpp"

#include <cmath>
#include <numbers>

#include "batopt/errors.hpp"

namespace batopt {

Eigen::MatrixXd cheb_matrix(int m, Eigen::VectorXd& x) {
  x.resize(m + 1);
  Eigen::VectorXd c(m + 1);
  for (int j = 0; j <= m; ++j) {
    x(j) = std::cos(std::numbers::pi * j / m);
    c(j) = ((j == 0 || j == m) ? 2.0 : 1.0) * ((j % 2) ? -1.0 : 1.0);
  }
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m + 1, m + 1);
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= m; ++j)
      if (i != j) d(i, j) = (c(i) / c(j)) / (x(i) - x(j));
  for (int i = 0; i <= m; ++i) d(i, i) = -d.row(i).sum();
  return d;
}

ChebDisc cheb_disc(int n_nodes, double radius) {
  if (n_nodes < 3) throw ConfigError("Chebyshev discretisation needs at least 3 nodes");
  if (!(radius > 0.0)) throw ConfigError("particle radius must be positive");
  const int n = n_nodes;
  const int m = 2 * n + 2;
  Eigen::VectorXd x;
  Eigen::MatrixXd d = cheb_matrix(m, x);
  Eigen::MatrixXd d2 = d * d;

  // Fold the odd extension onto the positive half: columns 0..n.
  Eigen::MatrixXd fold = Eigen::MatrixXd::Zero(m + 1, n + 1);
  for (int j = 0; j <= n; ++j) fold(j, j) = 1.0;
  for (int j = n + 2; j <= m; ++j) fold(j, m - j) = -1.0;
  Eigen::MatrixXd d1f = d * fold;
  Eigen::MatrixXd d2f = d2 * fold;

  ChebDisc disc;
  disc.n = n;
  disc.radius = radius;
  disc.nodes.resize(n);
  for (int j = 1; j <= n; ++j) disc.nodes(j - 1) = radius * x(j);

  // Flux row at x = 1 in unit radius: (d1f u)_0 - u_0 = -N_out R^2 / D.
  const double a0 = d1f(0, 0) - 1.0;
  disc.surface_weights.resize(n);
  for (int k = 1; k <= n; ++k) disc.surface_weights(k - 1) = -d1f(0, k) * x(k) / a0;
  const double h = 1.0 / a0;
  disc.surface_flux_coeff = h * radius;

  disc.laplacian.resize(n, n);
  disc.flux_gain.resize(n);
  const double inv_r2 = 1.0 / (radius * radius);
  for (int j = 1; j <= n; ++j) {
    for (int k = 1; k <= n; ++k)
      disc.laplacian(j - 1, k - 1) =
          inv_r2 * (d2f(j, k) * x(k) + d2f(j, 0) * disc.surface_weights(k - 1)) / x(j);
    disc.flux_gain(j - 1) = d2f(j, 0) * h / (x(j) * radius);
  }

  // Quadrature for the particle inventory: left null vector of the operator.
  Eigen::MatrixXd a = disc.laplacian.transpose();
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  disc.volume_weights = a.fullPivLu().solve(b);

  // Interpolation derivative on the state nodes.
  disc.d1 = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd w(n);
  for (int j = 0; j < n; ++j) {
    double p = 1.0;
    for (int k = 0; k < n; ++k)
      if (k != j) p *= disc.nodes(j) - disc.nodes(k);
    w(j) = 1.0 / p;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      if (i != j) disc.d1(i, j) = (w(j) / w(i)) / (disc.nodes(i) - disc.nodes(j));
    disc.d1(i, i) = -disc.d1.row(i).sum();
  }
  return disc;
}

double ChebDisc::surface(const double* c, double flux_in, double diffusivity) const {
  double s = surface_flux_coeff * flux_in / diffusivity;
  for (int k = 0; k < n; ++k) s += surface_weights(k) * c[k];
  return s;
}

double ChebDisc::mean(const double* c) const {
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += volume_weights(k) * c[k];
  return s;
}

}  // namespace batopt
