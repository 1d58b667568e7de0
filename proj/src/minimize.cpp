#include "rfdress/minimize.hpp"

#include <cmath>
#include <stdexcept>

namespace rfdress {

namespace {

Eigen::VectorXd clamp(const Eigen::VectorXd& x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

// One exploratory sweep around `base`; returns the improved point and value.
double explore(const Objective& f, Eigen::VectorXd& x, double fx, const Eigen::VectorXd& step,
               const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    for (double sign : {1.0, -1.0}) {
      Eigen::VectorXd trial = x;
      trial[i] += sign * step[i];
      trial = clamp(trial, lo, hi);
      if (trial[i] == x[i]) continue;
      const double ft = f(trial);
      if (ft < fx) {
        x = std::move(trial);
        fx = ft;
        break;
      }
    }
  }
  return fx;
}

}  // namespace

PatternSearchResult pattern_search(const Objective& f, const Eigen::VectorXd& start,
                                   const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                   const PatternSearchOptions& options) {
  const auto n = start.size();
  if (lower.size() != n || upper.size() != n || options.initial_step.size() != n)
    throw std::invalid_argument("pattern_search: dimension mismatch");
  if ((options.initial_step.array() <= 0.0).any())
    throw std::invalid_argument("pattern_search: steps must be positive");

  PatternSearchResult res;
  Eigen::VectorXd base = clamp(start, lower, upper);
  double f_base = f(base);
  Eigen::VectorXd step = options.initial_step;
  const Eigen::VectorXd min_step = options.initial_step * options.min_step_fraction;

  while (res.iterations < options.max_iterations) {
    if ((step.array() < min_step.array()).all()) {
      res.converged = true;
      break;
    }
    ++res.iterations;
    Eigen::VectorXd x = base;
    double fx = explore(f, x, f_base, step, lower, upper);
    if (!(fx < f_base)) {
      step *= 0.5;
      continue;
    }
    // Pattern moves along the last successful direction.
    while (res.iterations < options.max_iterations) {
      ++res.iterations;
      Eigen::VectorXd pattern = clamp(x + (x - base), lower, upper);
      base = x;
      f_base = fx;
      double fp = f(pattern);
      fp = explore(f, pattern, fp, step, lower, upper);
      if (fp < f_base) {
        x = std::move(pattern);
        fx = fp;
      } else {
        break;
      }
    }
  }
  res.x = base;
  res.value = f_base;
  return res;
}

double golden_section(const std::function<double(double)>& f, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (std::abs(b - a) > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace rfdress
