#include "batopt/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "batopt/errors.hpp"

namespace batopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-11;
constexpr int kDegenerateRun = 50;

class Simplex {
 public:
  Simplex(const LpProblem& lp, const LpOptions& opt) : lp_(lp), opt_(opt) {
    n_ = static_cast<int>(lp.c.size());
    m_ = static_cast<int>(lp.b.size());
    if (lp.A.rows() != m_ || lp.A.cols() != n_ || lp.lo.size() != n_ || lp.hi.size() != n_)
      throw ConfigError("LP dimensions are inconsistent");
    lo_.resize(n_ + m_);
    hi_.resize(n_ + m_);
    cost_ = Eigen::VectorXd::Zero(n_ + m_);
    for (int j = 0; j < n_; ++j) {
      if (!std::isfinite(lp.lo[j])) throw ConfigError("LP lower bounds must be finite");
      if (lp.hi[j] < lp.lo[j]) throw ConfigError("LP bounds are empty");
      lo_[j] = lp.lo[j];
      hi_[j] = lp.hi[j];
      cost_[j] = lp.c[j];
    }
    for (int i = 0; i < m_; ++i) {
      lo_[n_ + i] = 0.0;
      hi_[n_ + i] = kInf;
    }
    x_ = Eigen::VectorXd::Zero(n_ + m_);
    x_.head(n_) = lp.lo;
    x_.tail(m_) = lp.b - lp.A * lp.lo;
    for (int i = 0; i < m_; ++i)
      if (x_[n_ + i] < -opt_.feas_tol) throw ConfigError("LP start point violates row " + std::to_string(i));
    basis_.resize(m_);
    pos_.assign(n_ + m_, -1);
    at_upper_.assign(n_ + m_, false);
    for (int i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;
      pos_[n_ + i] = i;
    }
    binv_ = Eigen::MatrixXd::Identity(m_, m_);
  }

  LpResult run() {
    LpResult res;
    bool bland = false;
    int degenerate = 0;
    int since_refactor = 0;
    for (res.iterations = 0; res.iterations < opt_.max_iter; ++res.iterations) {
      if (since_refactor >= opt_.refactor_every) {
        refactor();
        since_refactor = 0;
      }
      Eigen::VectorXd y = duals();
      int q = -1;
      double best = 0.0;
      for (int j = 0; j < n_ + m_; ++j) {
        if (pos_[j] >= 0 || lo_[j] == hi_[j]) continue;
        double d = reduced_cost(j, y);
        bool eligible = at_upper_[j] ? d > opt_.opt_tol : d < -opt_.opt_tol;
        if (!eligible) continue;
        if (bland) {
          q = j;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          q = j;
        }
      }
      if (q < 0) {
        res.status = LpStatus::optimal;
        break;
      }
      const double dir = at_upper_[q] ? -1.0 : 1.0;
      Eigen::VectorXd alpha = binv_ * column(q);

      double t = hi_[q] - lo_[q];
      int r = -1;
      bool to_upper = false;
      for (int i = 0; i < m_; ++i) {
        double delta = -dir * alpha[i];
        int b = basis_[i];
        double ti;
        bool up;
        if (delta < -kPivotTol) {
          ti = (x_[b] - lo_[b]) / -delta;
          up = false;
        } else if (delta > kPivotTol && std::isfinite(hi_[b])) {
          ti = (hi_[b] - x_[b]) / delta;
          up = true;
        } else {
          continue;
        }
        ti = std::max(ti, 0.0);
        bool take = ti < t - 1e-12;
        if (!take && r >= 0 && ti <= t + 1e-12)
          take = bland ? b < basis_[r] : std::abs(alpha[i]) > std::abs(alpha[r]);
        if (take) {
          t = ti;
          r = i;
          to_upper = up;
        }
      }
      if (!std::isfinite(t)) {
        res.status = LpStatus::unbounded;
        break;
      }
      x_[q] += dir * t;
      for (int i = 0; i < m_; ++i) x_[basis_[i]] -= dir * t * alpha[i];

      if (t < 1e-12) {
        if (++degenerate > kDegenerateRun) bland = true;
      } else {
        degenerate = 0;
        bland = false;
      }

      if (r < 0) {
        at_upper_[q] = !at_upper_[q];
        x_[q] = at_upper_[q] ? hi_[q] : lo_[q];
        continue;
      }
      int leaving = basis_[r];
      x_[leaving] = to_upper ? hi_[leaving] : lo_[leaving];
      at_upper_[leaving] = to_upper;
      pos_[leaving] = -1;
      basis_[r] = q;
      pos_[q] = r;
      at_upper_[q] = false;

      const double piv = alpha[r];
      binv_.row(r) /= piv;
      for (int i = 0; i < m_; ++i)
        if (i != r && alpha[i] != 0.0) binv_.row(i) -= alpha[i] * binv_.row(r);
      ++since_refactor;
    }

    refactor();
    Eigen::VectorXd y = duals();
    res.x = x_.head(n_);
    res.y = y;
    res.objective = lp_.c.dot(res.x);
    double dual = lp_.b.dot(y);
    for (int j = 0; j < n_ + m_; ++j) {
      double d = reduced_cost(j, y);
      if (d >= 0.0) {
        dual += d * lo_[j];
      } else if (std::isfinite(hi_[j])) {
        dual += d * hi_[j];
      } else {
        dual += d * x_[j];
        if (d < -opt_.opt_tol) dual = -kInf;
      }
    }
    res.dual_objective = dual;
    res.gap = std::abs(res.objective - dual) / std::max(1.0, std::abs(res.objective));
    return res;
  }

 private:
  Eigen::VectorXd column(int j) const {
    if (j < n_) return lp_.A.col(j);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m_);
    e[j - n_] = 1.0;
    return e;
  }

  double reduced_cost(int j, const Eigen::VectorXd& y) const {
    if (j < n_) return cost_[j] - lp_.A.col(j).dot(y);
    return -y[j - n_];
  }

  Eigen::VectorXd duals() const {
    Eigen::VectorXd cb(m_);
    for (int i = 0; i < m_; ++i) cb[i] = cost_[basis_[i]];
    return binv_.transpose() * cb;
  }

  void refactor() {
    Eigen::MatrixXd B(m_, m_);
    for (int i = 0; i < m_; ++i) B.col(i) = column(basis_[i]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    binv_ = lu.inverse();
    Eigen::VectorXd rhs = lp_.b;
    for (int j = 0; j < n_ + m_; ++j)
      if (pos_[j] < 0 && x_[j] != 0.0) rhs -= column(j) * x_[j];
    Eigen::VectorXd xb = lu.solve(rhs);
    for (int i = 0; i < m_; ++i) x_[basis_[i]] = xb[i];
  }

  const LpProblem& lp_;
  const LpOptions& opt_;
  int n_ = 0;
  int m_ = 0;
  Eigen::VectorXd lo_, hi_, cost_, x_;
  std::vector<int> basis_;
  std::vector<int> pos_;
  std::vector<bool> at_upper_;
  Eigen::MatrixXd binv_;
};

}  // namespace

LpResult solve_lp(const LpProblem& lp, const LpOptions& opt) {
  Simplex s(lp, opt);
  return s.run();
}

}  // namespace batopt
