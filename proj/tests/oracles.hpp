#pragma once

#include <cmath>
#include <vector>

namespace oracle {

// Finite-volume spherical diffusion, Crank-Nicolson in time.
// Shell k spans [k dr, (k+1) dr]; j_in is the molar flux into the particle.
class FdSphere {
 public:
  FdSphere(int cells, double radius, double diffusivity, double c0)
      : n_(cells), dr_(radius / cells), d_(diffusivity), c_(cells, c0), vol_(cells), area_(cells + 1) {
    for (int k = 0; k <= n_; ++k) area_[k] = (k * dr_) * (k * dr_);
    for (int k = 0; k < n_; ++k) vol_[k] = (std::pow((k + 1) * dr_, 3) - std::pow(k * dr_, 3)) / 3.0;
  }

  void step(double dt, double j_in) {
    // vol dc/dt = D [a_{k+1}(c_{k+1}-c_k) - a_k(c_k-c_{k-1})]/dr + a_n j_in at the surface
    std::vector<double> lo(n_), di(n_), up(n_), rhs(n_);
    for (int k = 0; k < n_; ++k) {
      double wl = k > 0 ? d_ * area_[k] / dr_ : 0.0;
      double wr = k < n_ - 1 ? d_ * area_[k + 1] / dr_ : 0.0;
      double f = (k > 0 ? wl * (c_[k - 1] - c_[k]) : 0.0) + (k < n_ - 1 ? wr * (c_[k + 1] - c_[k]) : 0.0);
      double src = k == n_ - 1 ? area_[n_] * j_in : 0.0;
      rhs[k] = vol_[k] * c_[k] + 0.5 * dt * f + dt * src;
      lo[k] = -0.5 * dt * wl;
      up[k] = -0.5 * dt * wr;
      di[k] = vol_[k] + 0.5 * dt * (wl + wr);
    }
    for (int k = 1; k < n_; ++k) {
      double m = lo[k] / di[k - 1];
      di[k] -= m * up[k - 1];
      rhs[k] -= m * rhs[k - 1];
    }
    c_[n_ - 1] = rhs[n_ - 1] / di[n_ - 1];
    for (int k = n_ - 2; k >= 0; --k) c_[k] = (rhs[k] - up[k] * c_[k + 1]) / di[k];
  }

  // Quadratic extrapolation of the last two cells with the surface flux condition.
  double surface(double j_in) const {
    double c1 = c_[n_ - 1], c2 = c_[n_ - 2];
    double g = j_in / d_;  // dc/dr at r = R
    // fit c = a + b s + q s^2 with s distance from the surface, c'(0) = -g in s
    // cell centres at s = dr/2 and 3 dr/2
    double h = dr_;
    double q = (c2 - c1 - g * h) / (2.0 * h * h);
    return c1 + g * h / 2.0 - q * h * h / 4.0;
  }

  double mean() const {
    double s = 0.0, v = 0.0;
    for (int k = 0; k < n_; ++k) {
      s += vol_[k] * c_[k];
      v += vol_[k];
    }
    return s / v;
  }

 private:
  int n_;
  double dr_, d_;
  std::vector<double> c_, vol_, area_;
};

}  // namespace oracle
