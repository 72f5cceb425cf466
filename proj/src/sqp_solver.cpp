#include "batopt/sqp_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>

#include <Eigen/Dense>

#include "batopt/errors.hpp"
#include "batopt/qp.hpp"

namespace batopt {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::infeasible: return "infeasible";
  }
  return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr std::size_t kStallWindow = 30;
constexpr double kSnap = 1e-9;  // controls this close to a bound (relative) are moved onto it
constexpr double kScreen = 0.2;  // state rows closer than this (in state scale) enter the QP

struct Row {
  enum Kind { path, state } kind;
  int k;  // interval for path rows, node for state rows
  int i;  // sample or state component
  double lo, hi, unit;
};

// Linearisation of the reduced problem at one iterate, in scaled controls.
struct Linearisation {
  Eigen::VectorXd g;  // gradient of the scaled minimisation objective
  Eigen::MatrixXd A;  // rows
  Eigen::VectorXd c;  // row values
};

class Sqp {
 public:
  Sqp(const NlpInstance& nlp, const SolverOptions& opt) : nlp_(nlp), opt_(opt) {
    n_ = nlp.intervals();
    nx_ = nlp.state_dim();
    nq_ = nlp.model().quad_dim();
    np_ = nlp.model().path_dim();
    ul_ = nlp.spec().control_lower();
    uh_ = nlp.spec().control_upper();
    su_ = std::max(std::abs(ul_), std::abs(uh_));
    floor_ = 1e-3 * opt.feas_tol;
    std::vector<double> plo, phi;
    nlp.path_bounds(plo, phi);
    const double margin = nlp.spec().voltage_margin;
    for (int k = 0; k < n_; ++k)
      for (int s = 0; s < np_; ++s)
        rows_.push_back({Row::path, k, s, plo[static_cast<std::size_t>(s)] + margin,
                         phi[static_cast<std::size_t>(s)] - margin, 1.0});
    auto scale = nlp.model().state_scale();
    const auto& lo = nlp.lower_bounds();
    const auto& hi = nlp.upper_bounds();
    for (int k = 1; k <= n_; ++k)
      for (int i = 0; i < nx_; ++i) {
        double l = lo[nlp.x_index(k, i)], h = hi[nlp.x_index(k, i)];
        if (std::isfinite(l) || std::isfinite(h))
          rows_.push_back({Row::state, k, i, l, h, scale[static_cast<std::size_t>(i)]});
      }
  }

  OcpSolution run(std::span<const double> guess);

 private:
  double row_value(const Row& r, std::span<const double> w, const NlpEvaluation& e) const {
    if (r.kind == Row::path) return e.results[static_cast<std::size_t>(r.k)].path[static_cast<std::size_t>(r.i)];
    return w[nlp_.x_index(r.k, r.i)];
  }
  static double excess(double v, double lo, double hi) { return std::max({0.0, lo - v, v - hi}); }

  double physical_violation(std::span<const double> w, const NlpEvaluation& e) const {
    double v = 0.0;
    for (const auto& r : rows_) v = std::max(v, excess(row_value(r, w, e), r.lo, r.hi) / r.unit);
    return v;
  }

  // Sum of row excesses measured along the unit-normalised rows of the current linearisation.
  double merit_violation(std::span<const double> w, const NlpEvaluation& e) const {
    double v = 0.0;
    for (std::size_t j = 0; j < rows_.size(); ++j) {
      const auto& r = rows_[j];
      v += std::max(0.0, excess(row_value(r, w, e), r.lo, r.hi) - floor_ * r.unit) / row_norm_[j];
    }
    return v;
  }

  void linearise(std::span<const double> w, const NlpEvaluation& e, Linearisation& lin);
  std::optional<std::vector<double>> try_rollout(std::span<const double> u) const {
    try {
      return nlp_.rollout(u);
    } catch (const EvaluationError&) {
      return std::nullopt;
    } catch (const DomainError&) {
      return std::nullopt;
    }
  }

  const NlpInstance& nlp_;
  SolverOptions opt_;
  int n_ = 0, nx_ = 0, nq_ = 0, np_ = 0;
  double ul_ = 0.0, uh_ = 0.0, su_ = 1.0;
  double fs_ = 1.0;  // objective scaling
  double floor_ = 0.0;  // row excess below this (in row units) is treated as noise
  std::vector<Row> rows_;
  std::vector<double> row_norm_;
  Eigen::MatrixXd G_;  // node sensitivities to controls
};

void Sqp::linearise(std::span<const double> w, const NlpEvaluation& e, Linearisation& lin) {
  const int nin = nx_ + 1;
  G_.setZero((n_ + 1) * nx_, n_);
  Eigen::MatrixXd Ak(nx_, nx_);
  for (int k = 0; k < n_; ++k) {
    const auto& jac = e.jacobians[static_cast<std::size_t>(k)];
    for (int i = 0; i < nx_; ++i)
      for (int j = 0; j < nx_; ++j) Ak(i, j) = jac[static_cast<std::size_t>(i * nin + j)];
    if (k > 0) G_.block((k + 1) * nx_, 0, nx_, k).noalias() = Ak * G_.block(k * nx_, 0, nx_, k);
    for (int i = 0; i < nx_; ++i) G_((k + 1) * nx_ + i, k) = jac[static_cast<std::size_t>(i * nin + nx_)];
  }
  // Reduced gradient of -objective.
  Eigen::VectorXd gx((n_ + 1) * nx_), gu(n_);
  for (int i = 0; i < (n_ + 1) * nx_; ++i) gx[i] = e.gradient[static_cast<std::size_t>(i)];
  for (int k = 0; k < n_; ++k) gu[k] = e.gradient[nlp_.u_index(k)];
  lin.g = -(gu + G_.transpose() * gx) * (fs_ * su_);

  const std::size_t m = rows_.size();
  lin.A.setZero(static_cast<Eigen::Index>(m), n_);
  lin.c.resize(static_cast<Eigen::Index>(m));
  for (std::size_t j = 0; j < m; ++j) {
    const auto& r = rows_[j];
    const Eigen::Index row = static_cast<Eigen::Index>(j);
    lin.c[row] = row_value(r, w, e);
    if (r.kind == Row::path) {
      const auto& jac = e.jacobians[static_cast<std::size_t>(r.k)];
      const double* pr = &jac[static_cast<std::size_t>((nx_ + nq_ + r.i) * nin)];
      Eigen::Map<const Eigen::VectorXd> px(pr, nx_);
      if (r.k > 0) lin.A.row(row).head(r.k) = px.transpose() * G_.block(r.k * nx_, 0, nx_, r.k);
      lin.A(row, r.k) += pr[nx_];
    } else {
      lin.A.row(row).head(r.k) = G_.row(r.k * nx_ + r.i).head(r.k);
    }
  }
  lin.A *= su_;
}

OcpSolution Sqp::run(std::span<const double> guess) {
  const auto t_start = std::chrono::steady_clock::now();
  SolveReport rep;
  std::vector<double> u(static_cast<std::size_t>(n_), 0.0);
  if (guess.size() == u.size())
    for (int k = 0; k < n_; ++k) u[static_cast<std::size_t>(k)] = std::clamp(guess[static_cast<std::size_t>(k)], ul_, uh_);

  auto w0 = try_rollout(u);
  if (w0) {
    auto e = nlp_.evaluate(*w0, false);
    if (physical_violation(*w0, e) > opt_.feas_tol) w0.reset();
  }
  if (!w0) {
    std::fill(u.begin(), u.end(), 0.0);
    w0 = try_rollout(u);
  }
  if (!w0) {
    rep.status = SolveStatus::infeasible;
    rep.message = "initial rollout failed";
    OcpSolution sol;
    sol.report = rep;
    return sol;
  }
  std::vector<double> w = std::move(*w0);
  NlpEvaluation ev = nlp_.evaluate(w, true);

  Linearisation lin;
  fs_ = 1.0;
  linearise(w, ev, lin);
  {
    double gn = lin.g.lpNorm<Eigen::Infinity>();
    if (gn > 0.0) fs_ = 1.0 / gn;
    lin.g *= fs_;
  }

  const Eigen::Index m = static_cast<Eigen::Index>(rows_.size());
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(n_, n_);
  bool fresh_hessian = true;
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(m);
  double nu = 1.0;
  int stalls = 0;

  std::vector<double> best_w;
  double best_obj = -kInf;
  auto consider_best = [&](const std::vector<double>& ww, const NlpEvaluation& ee) {
    if (physical_violation(ww, ee) <= opt_.feas_tol && ee.objective > best_obj) {
      best_obj = ee.objective;
      best_w = ww;
    }
  };
  consider_best(w, ev);

  rep.status = SolveStatus::max_iter;
  std::vector<double> history;
  int iter = 0;
  for (; iter < opt_.max_iter; ++iter) {
    row_norm_.assign(rows_.size(), 1.0);
    for (Eigen::Index j = 0; j < m; ++j) {
      double a = lin.A.row(j).norm();
      row_norm_[static_cast<std::size_t>(j)] = a > 1e-14 ? a : rows_[static_cast<std::size_t>(j)].unit;
    }

    Eigen::VectorXd rlo(m), rhi(m);
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto& r = rows_[static_cast<std::size_t>(j)];
      rlo[j] = r.lo - floor_ * r.unit;
      rhi[j] = r.hi + floor_ * r.unit;
    }
    Eigen::VectorXd dlo(n_), dhi(n_);
    for (int k = 0; k < n_; ++k) {
      dlo[k] = (ul_ - u[static_cast<std::size_t>(k)]) / su_;
      dhi[k] = (uh_ - u[static_cast<std::size_t>(k)]) / su_;
    }
    // Path rows always enter the subproblem; state rows only near their bounds,
    // with a re-solve if the step would violate one left out.
    std::vector<char> work(static_cast<std::size_t>(m), 0);
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto& r = rows_[static_cast<std::size_t>(j)];
      bool near = r.kind == Row::path || std::abs(mu[j]) > 1e-8 || lin.c[j] - r.lo < kScreen * r.unit ||
                  r.hi - lin.c[j] < kScreen * r.unit;
      work[static_cast<std::size_t>(j)] = near;
    }
    auto solve_sub = [&](const Eigen::VectorXd& cvals, Eigen::VectorXd& mu_out) {
      QpResult res;
      for (int pass = 0; pass < 8; ++pass) {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index j = 0; j < m; ++j)
          if (work[static_cast<std::size_t>(j)]) idx.push_back(j);
        QpProblem qp;
        qp.H = B;
        qp.g = lin.g;
        const Eigen::Index mw = static_cast<Eigen::Index>(idx.size());
        qp.A.resize(mw, n_);
        qp.c.resize(mw);
        qp.lo.resize(mw);
        qp.hi.resize(mw);
        for (Eigen::Index i = 0; i < mw; ++i) {
          Eigen::Index j = idx[static_cast<std::size_t>(i)];
          qp.A.row(i) = lin.A.row(j);
          qp.c[i] = cvals[j];
          qp.lo[i] = rlo[j];
          qp.hi[i] = rhi[j];
        }
        qp.dlo = dlo;
        qp.dhi = dhi;
        res = solve_box_qp(qp);
        mu_out.setZero(m);
        for (Eigen::Index i = 0; i < mw; ++i) mu_out[idx[static_cast<std::size_t>(i)]] = res.mu[i];
        Eigen::VectorXd vals = cvals + lin.A * res.d;
        bool added = false;
        for (Eigen::Index j = 0; j < m; ++j) {
          if (work[static_cast<std::size_t>(j)]) continue;
          if (vals[j] < rlo[j] || vals[j] > rhi[j]) {
            work[static_cast<std::size_t>(j)] = 1;
            added = true;
          }
        }
        if (!added) break;
      }
      return res;
    };
    QpResult qr = solve_sub(lin.c, mu);
    const Eigen::VectorXd& d = qr.d;

    // Stationarity and complementarity with the QP multipliers.
    Eigen::VectorXd gl = lin.g + lin.A.transpose() * mu + qr.box;
    double kkt = gl.lpNorm<Eigen::Infinity>();
    for (int k = 0; k < n_; ++k) {
      double dist = qr.box[k] > 0.0 ? dhi[k] : -dlo[k];
      kkt = std::max(kkt, std::abs(qr.box[k]) * dist);
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      double slack = mu[j] > 0.0 ? rhi[j] - lin.c[j] : rlo[j] - lin.c[j];
      if (mu[j] != 0.0 && std::isfinite(slack)) kkt = std::max(kkt, std::abs(mu[j] * slack));
    }
    const double theta_phys = physical_violation(w, ev);
    rep.kkt = kkt;
    if (opt_.verbose)
      std::fprintf(stderr, "it %4d obj %.9g viol %.3e kkt %.3e |d| %.3e qp %d %d nu %.2e\n", iter,
                   ev.objective, theta_phys, kkt, d.lpNorm<Eigen::Infinity>(), qr.iterations, static_cast<int>(qr.converged), nu);
    if (kkt <= opt_.kkt_tol && theta_phys <= opt_.feas_tol) {
      rep.status = SolveStatus::optimal;
      break;
    }
    history.push_back(ev.objective);
    if (history.size() > kStallWindow) {
      double old = history[history.size() - 1 - kStallWindow];
      if (theta_phys <= opt_.feas_tol &&
          std::abs(ev.objective - old) <= 1e-11 * std::max(1.0, std::abs(ev.objective))) {
        rep.message = "no progress at working precision";
        break;
      }
    }

    // l1 merit along the unit-normalised rows.
    for (Eigen::Index j = 0; j < m; ++j)
      nu = std::max(nu, 1.1 * std::abs(mu[j]) * row_norm_[static_cast<std::size_t>(j)] + 1e-8);
    const double f0 = -ev.objective * fs_;
    const double th0 = merit_violation(w, ev);
    const double phi0 = f0 + nu * th0;
    Eigen::VectorXd lin_rows = lin.c + lin.A * d;
    double th_lin = 0.0;
    for (Eigen::Index j = 0; j < m; ++j)
      th_lin += excess(lin_rows[j], rlo[j], rhi[j]) / row_norm_[static_cast<std::size_t>(j)];
    const double D = lin.g.dot(d) + nu * (th_lin - th0);

    bool accepted = false;
    std::vector<double> u_new(u.size()), w_new;
    NlpEvaluation ev_new;
    struct Trial {
      std::vector<double> w;
      NlpEvaluation e;
      double phi;
    };
    auto trial = [&](const Eigen::VectorXd& step, double alpha) -> std::optional<Trial> {
      for (int k = 0; k < n_; ++k) {
        double v = std::clamp(u[static_cast<std::size_t>(k)] + alpha * su_ * step[k], ul_, uh_);
        if (uh_ - v < kSnap * su_) v = uh_;
        if (v - ul_ < kSnap * su_) v = ul_;
        u_new[static_cast<std::size_t>(k)] = v;
      }
      auto wt = try_rollout(u_new);
      if (!wt) return std::nullopt;
      Trial t;
      try {
        t.e = nlp_.evaluate(*wt, false);
      } catch (const EvaluationError&) {
        return std::nullopt;
      }
      t.w = std::move(*wt);
      t.phi = -t.e.objective * fs_ + nu * merit_violation(t.w, t.e);
      return t;
    };
    const double slack_phi = 10.0 * kEps * std::abs(phi0);
    if (D < -kEps * std::abs(phi0)) {
      double alpha = 1.0;
      for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
        auto t = trial(d, alpha);
        if (!t) continue;
        if (opt_.verbose && (ls == 0 || ls == 39))
          std::fprintf(stderr, "    ls alpha %.2e df %.3e dth %.3e D %.3e\n", alpha,
                       -t->e.objective * fs_ - f0, merit_violation(t->w, t->e) - th0, D);
        if (t->phi <= phi0 + 1e-4 * alpha * D + slack_phi) {
          w_new = std::move(t->w);
          accepted = true;
          break;
        }
        if (ls == 0 && merit_violation(t->w, t->e) > th0) {
          // Second-order correction: re-linearise the rows around the trial values.
          Eigen::VectorXd c_soc(m);
          for (Eigen::Index j = 0; j < m; ++j)
            c_soc[j] = row_value(rows_[static_cast<std::size_t>(j)], t->w, t->e);
          c_soc -= lin.A * d;
          Eigen::VectorXd mu_soc;
          QpResult qs = solve_sub(c_soc, mu_soc);
          auto ts = trial(qs.d, 1.0);
          if (ts && ts->phi <= phi0 + 1e-4 * D + slack_phi) {
            w_new = std::move(ts->w);
            accepted = true;
            break;
          }
        }
      }
    }
    if (!accepted) {
      if (fresh_hessian && D >= -kEps * std::abs(phi0) && theta_phys <= opt_.feas_tol) {
        rep.message = "no descent direction at working precision";
        break;
      }
      if (fresh_hessian) {
        if (++stalls >= 3) {
          rep.message = "line search stalled";
          break;
        }
      }
      B.setIdentity();
      fresh_hessian = true;
      continue;
    }
    stalls = 0;

    try {
      ev_new = nlp_.evaluate(w_new, true);
    } catch (const EvaluationError& ex) {
      rep.message = ex.what();
      break;
    }
    Eigen::VectorXd gl_old = lin.g + lin.A.transpose() * mu;
    Linearisation lin_new;
    linearise(w_new, ev_new, lin_new);
    lin_new.g *= fs_;
    Eigen::VectorXd gl_new = lin_new.g + lin_new.A.transpose() * mu;
    Eigen::VectorXd s(n_);
    for (int k = 0; k < n_; ++k) s[k] = (u_new[static_cast<std::size_t>(k)] - u[static_cast<std::size_t>(k)]) / su_;
    Eigen::VectorXd y = gl_new - gl_old;

    if (s.lpNorm<Eigen::Infinity>() > 1e-14) {
      double sy = s.dot(y);
      if (fresh_hessian && sy > 0.0) B = Eigen::MatrixXd::Identity(n_, n_) * std::max(y.squaredNorm() / sy, 1e-8);
      Eigen::VectorXd Bs = B * s;
      double sBs = s.dot(Bs);
      if (sy < 0.2 * sBs) {
        double t = 0.8 * sBs / (sBs - sy);
        y = t * y + (1.0 - t) * Bs;
        sy = s.dot(y);
      }
      if (sy > 0.0 && sBs > 0.0) {
        B.noalias() += (y * y.transpose()) / sy - (Bs * Bs.transpose()) / sBs;
        fresh_hessian = false;
      }
    }
    u = std::move(u_new);
    w = std::move(w_new);
    ev = std::move(ev_new);
    lin = std::move(lin_new);
    consider_best(w, ev);
  }

  OcpSolution sol;
  if (rep.status != SolveStatus::optimal) {
    if (!best_w.empty()) {
      w = best_w;
      rep.status = SolveStatus::max_iter;
      if (rep.message.empty()) rep.message = "iteration limit reached";
    } else {
      rep.status = SolveStatus::infeasible;
      if (rep.message.empty()) rep.message = "no feasible iterate";
    }
    ev = nlp_.evaluate(w, false);
  }
  rep.iterations = iter;
  rep.objective = ev.objective;
  rep.revenue = ev.revenue;
  rep.degradation_cost = ev.cost;
  rep.max_defect = 0.0;
  for (double dv : ev.defects) rep.max_defect = std::max(rep.max_defect, std::abs(dv));
  rep.max_violation = nlp_.max_violation(w, ev);
  rep.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  sol.profile = nlp_.control_profile(w);
  sol.w = std::move(w);
  sol.report = rep;
  return sol;
}

}  // namespace

OcpSolution solve_nlp(const NlpInstance& nlp, const SolverOptions& opt, std::span<const double> u_guess) {
  Sqp sqp(nlp, opt);
  return sqp.run(u_guess);
}

}  // namespace batopt
