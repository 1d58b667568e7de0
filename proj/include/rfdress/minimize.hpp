#pragma once

#include <Eigen/Core>

#include <functional>

namespace rfdress {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct PatternSearchOptions {
  Eigen::VectorXd initial_step;  // per coordinate
  double min_step_fraction = 1e-9;  // stop once every step shrank below this fraction of its start
  int max_iterations = 10000;
};

struct PatternSearchResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Hooke-Jeeves pattern search restricted to the box [lower, upper].
/// Derivative free, so it tolerates the cusps of the dressed potential where
/// detuning and coupling vanish together.
PatternSearchResult pattern_search(const Objective& f, const Eigen::VectorXd& start,
                                   const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                   const PatternSearchOptions& options);

/// Golden-section minimization of a unimodal function on [a, b].
double golden_section(const std::function<double(double)>& f, double a, double b, double tol);

}  // namespace rfdress
