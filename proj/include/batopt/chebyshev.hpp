#pragma once

#include <Eigen/Dense>
#include <vector>

namespace batopt {

// Chebyshev collocation of spherical diffusion in one particle.
//
// With u = r c the diffusion equation becomes u_t = D u_rr. u is extended as an
// odd function to [-R, R] and sampled on the Chebyshev-Gauss-Lobatto grid with
// 2n + 2 intervals; the n interior nodes with r > 0 carry the state, the
// surface value follows from the flux boundary row and u(0) = 0 by symmetry.
//
//   c_surface = surface_weights . c + surface_flux_coeff * j_in / D
//   dc/dt     = D * laplacian * c + flux_gain * j_in
//
// j_in is the molar flux into the particle through its surface (mol m^-2 s^-1).
struct ChebDisc {
  int n = 0;
  double radius = 0.0;
  Eigen::VectorXd nodes;            // radii of the state nodes, surface side first
  Eigen::MatrixXd d1;               // d/dr on the state nodes
  Eigen::MatrixXd laplacian;        // (1/r^2) d/dr (r^2 d/dr) with the flux row eliminated
  Eigen::VectorXd flux_gain;
  Eigen::VectorXd surface_weights;
  double surface_flux_coeff = 0.0;
  Eigen::VectorXd volume_weights;   // mean concentration = volume_weights . c, sums to 1

  double surface(const double* c, double flux_in, double diffusivity) const;
  double mean(const double* c) const;
};

ChebDisc cheb_disc(int n_nodes, double radius);

// Standard Chebyshev-Gauss-Lobatto differentiation matrix on [-1, 1], x_j = cos(j pi / m).
Eigen::MatrixXd cheb_matrix(int m, Eigen::VectorXd& x);

}  // namespace batopt
