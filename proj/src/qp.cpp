#include "batopt/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace batopt {

namespace {

// One-sided constraint sign * (c + a d) >= sign * bound, stored per side.
struct Side {
  Eigen::Index row;  // -1 for a box side
  Eigen::Index var;  // box variable
  double sign;
  double rhs;        // sign * bound - sign * c (rows) or sign * bound (box)
};

}  // namespace

QpResult solve_box_qp(const QpProblem& qp, const QpOptions& opt) {
  const Eigen::Index n = qp.g.size();
  const Eigen::Index m = qp.A.rows();
  Eigen::VectorXd norm(m);
  for (Eigen::Index r = 0; r < m; ++r) norm[r] = std::max(qp.A.row(r).norm(), 1e-300);

  std::vector<Side> sides;
  for (Eigen::Index r = 0; r < m; ++r) {
    if (qp.A.row(r).norm() <= 1e-14) continue;
    if (std::isfinite(qp.lo[r])) sides.push_back({r, -1, 1.0, (qp.lo[r] - qp.c[r]) / norm[r]});
    if (std::isfinite(qp.hi[r])) sides.push_back({r, -1, -1.0, (qp.c[r] - qp.hi[r]) / norm[r]});
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    sides.push_back({-1, j, 1.0, qp.dlo[j]});
    sides.push_back({-1, j, -1.0, -qp.dhi[j]});
  }
  const std::size_t ns = sides.size();
  Eigen::MatrixXd An(m, n);
  for (Eigen::Index r = 0; r < m; ++r) An.row(r) = qp.A.row(r) / norm[r];

  auto cx = [&](const Eigen::VectorXd& d, Eigen::VectorXd& out) {
    Eigen::VectorXd ad = An * d;
    out.resize(static_cast<Eigen::Index>(ns));
    for (std::size_t i = 0; i < ns; ++i) {
      const auto& s = sides[i];
      double v = s.row >= 0 ? ad[s.row] : d[s.var];
      out[static_cast<Eigen::Index>(i)] = s.sign * v;
    }
  };
  // C' v for a vector over sides.
  auto ctv = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < ns; ++i) {
      const auto& s = sides[i];
      double x = s.sign * v[static_cast<Eigen::Index>(i)];
      if (s.row >= 0)
        rows[s.row] += x;
      else
        out[s.var] += x;
    }
    out.noalias() += An.transpose() * rows;
    return out;
  };

  const Eigen::Index K = static_cast<Eigen::Index>(ns);
  Eigen::VectorXd b(K);
  for (std::size_t i = 0; i < ns; ++i) b[static_cast<Eigen::Index>(i)] = sides[i].rhs;

  QpResult res;
  Eigen::VectorXd d = (qp.dlo + qp.dhi) * 0.5;
  d = d.cwiseMax(qp.dlo).cwiseMin(qp.dhi);
  for (Eigen::Index j = 0; j < n; ++j)
    if (qp.dlo[j] <= 0.0 && 0.0 <= qp.dhi[j]) d[j] = 0.0;
  Eigen::VectorXd Cd;
  cx(d, Cd);
  Eigen::VectorXd s = (Cd - b).cwiseMax(1.0);
  Eigen::VectorXd z = Eigen::VectorXd::Ones(K);
  const double gscale = 1.0 + qp.g.lpNorm<Eigen::Infinity>();

  Eigen::VectorXd best_d = d;
  double best_res = std::numeric_limits<double>::infinity();
  for (res.iterations = 0; res.iterations < opt.max_iter; ++res.iterations) {
    cx(d, Cd);
    Eigen::VectorXd rd = qp.H * d + qp.g - ctv(z);
    Eigen::VectorXd rp = Cd - s - b;
    double mu = K ? s.dot(z) / static_cast<double>(K) : 0.0;
    double rdn = rd.lpNorm<Eigen::Infinity>() / gscale;
    double rpn = K ? rp.lpNorm<Eigen::Infinity>() : 0.0;
    double merit = std::max({rdn, rpn, mu});
    if (merit < best_res) {
      best_res = merit;
      best_d = d;
    }
    if (rdn <= opt.tol && rpn <= opt.tol && mu <= opt.tol) {
      res.converged = true;
      break;
    }

    Eigen::VectorXd w = z.cwiseQuotient(s);
    Eigen::VectorXd row_w = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd box_w = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < ns; ++i) {
      const auto& sd = sides[i];
      if (sd.row >= 0)
        row_w[sd.row] += w[static_cast<Eigen::Index>(i)];
      else
        box_w[sd.var] += w[static_cast<Eigen::Index>(i)];
    }
    Eigen::MatrixXd M = qp.H;
    M.diagonal() += box_w;
    std::vector<Eigen::Index> act;
    for (Eigen::Index r = 0; r < m; ++r)
      if (row_w[r] > 0.0) act.push_back(r);
    if (!act.empty()) {
      Eigen::MatrixXd As(static_cast<Eigen::Index>(act.size()), n);
      for (std::size_t i = 0; i < act.size(); ++i)
        As.row(static_cast<Eigen::Index>(i)) = An.row(act[i]) * std::sqrt(row_w[act[i]]);
      M.selfadjointView<Eigen::Lower>().rankUpdate(As.transpose());
      M.triangularView<Eigen::StrictlyUpper>() = M.transpose();
    }
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    double shift = 0.0;
    while (llt.info() != Eigen::Success) {
      shift = shift == 0.0 ? 1e-12 * (1.0 + M.diagonal().cwiseAbs().maxCoeff()) : shift * 10.0;
      llt.compute(M + shift * Eigen::MatrixXd::Identity(n, n));
    }

    auto solve_dir = [&](const Eigen::VectorXd& rc, Eigen::VectorXd& dd, Eigen::VectorXd& ds,
                         Eigen::VectorXd& dz) {
      Eigen::VectorXd t = rc.cwiseQuotient(s) - w.cwiseProduct(rp);
      dd = llt.solve(-rd + ctv(t));
      Eigen::VectorXd Cdd;
      cx(dd, Cdd);
      ds = Cdd + rp;
      dz = (rc - z.cwiseProduct(ds)).cwiseQuotient(s);
    };
    auto max_step = [&](const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
      double a = 1.0;
      for (Eigen::Index i = 0; i < v.size(); ++i)
        if (dv[i] < 0.0) a = std::min(a, -v[i] / dv[i]);
      return a;
    };

    Eigen::VectorXd dd, ds, dz;
    Eigen::VectorXd rc = -s.cwiseProduct(z);
    solve_dir(rc, dd, ds, dz);
    double ap = max_step(s, ds), ad = max_step(z, dz);
    double a_aff = std::min(ap, ad);
    double mu_aff = (s + a_aff * ds).dot(z + a_aff * dz) / static_cast<double>(K);
    double sigma = std::pow(mu_aff / mu, 3.0);
    rc = -s.cwiseProduct(z) - ds.cwiseProduct(dz) + Eigen::VectorXd::Constant(K, sigma * mu);
    solve_dir(rc, dd, ds, dz);
    double alpha = std::min(1.0, 0.995 * std::min(max_step(s, ds), max_step(z, dz)));
    d += alpha * dd;
    s += alpha * ds;
    z += alpha * dz;
  }
  if (!res.converged) d = best_d;
  res.d = d;
  res.mu = Eigen::VectorXd::Zero(m);
  res.box = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < ns; ++i) {
    const auto& sd = sides[i];
    double v = -sd.sign * z[static_cast<Eigen::Index>(i)];
    if (sd.row >= 0)
      res.mu[sd.row] += v / norm[sd.row];
    else
      res.box[sd.var] += v;
  }
  Eigen::VectorXd v = qp.c + qp.A * d;
  res.violation = 0.0;
  for (Eigen::Index r = 0; r < m; ++r) {
    double e = std::max({0.0, qp.lo[r] - v[r], v[r] - qp.hi[r]}) / norm[r];
    if (qp.A.row(r).norm() > 1e-14) res.violation = std::max(res.violation, e);
  }
  return res;
}

}  // namespace batopt
