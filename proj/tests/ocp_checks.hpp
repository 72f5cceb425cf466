#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "batopt/errors.hpp"
#include "batopt/nlp.hpp"

namespace ocpcheck {

// Random controls within half the bounds whose rollout satisfies every bound.
inline std::vector<double> random_feasible_point(const batopt::NlpInstance& nlp, std::mt19937& rng) {
  const auto& spec = nlp.spec();
  std::uniform_real_distribution<double> u(0.5 * spec.control_lower(), 0.5 * spec.control_upper());
  for (int attempt = 0; attempt < 200; ++attempt) {
    std::vector<double> c(static_cast<std::size_t>(nlp.intervals()));
    for (double& x : c) x = u(rng);
    try {
      std::vector<double> w = nlp.rollout(c);
      if (nlp.max_violation(w, nlp.evaluate(w, false)) == 0.0) return w;
    } catch (const batopt::EvaluationError&) {
    }
  }
  return {};
}

struct GradientCheck {
  double max_rel_error = 0.0;  // max |g - fd| / max |fd|
  double norm = 0.0;
};

// Central differences on every NLP variable; states step relative to their scale.
inline GradientCheck check_gradient(const batopt::NlpInstance& nlp, const std::vector<double>& w,
                                    double rel_step = 1e-7) {
  std::vector<double> g = nlp.gradient(w);
  std::vector<double> scale = nlp.model().state_scale();
  const double ubound = std::max(std::abs(nlp.spec().control_lower()), std::abs(nlp.spec().control_upper()));
  std::vector<double> fd(w.size());
  std::vector<double> p = w;
  const int nx = nlp.state_dim();
  for (std::size_t i = 0; i < w.size(); ++i) {
    bool is_state = i < static_cast<std::size_t>((nlp.intervals() + 1) * nx);
    double s = is_state ? scale[i % static_cast<std::size_t>(nx)] : ubound;
    double h = rel_step * s;
    p[i] = w[i] + h;
    double fp = nlp.objective(p);
    p[i] = w[i] - h;
    double fm = nlp.objective(p);
    p[i] = w[i];
    fd[i] = (fp - fm) / (2.0 * h);
  }
  GradientCheck r;
  for (double x : fd) r.norm = std::max(r.norm, std::abs(x));
  for (std::size_t i = 0; i < w.size(); ++i)
    r.max_rel_error = std::max(r.max_rel_error, std::abs(g[i] - fd[i]) / r.norm);
  return r;
}

}  // namespace ocpcheck
