#pragma once

#include <functional>
#include <span>
#include <vector>

namespace sigver::ann {

/// Returns f(w) and writes the gradient into `grad` (same length as w).
using Objective = std::function<double(std::span<const double> w, std::span<double> grad)>;

struct ScgOptions {
  int max_iterations = 500;
  double sigma = 5e-5;        // finite-difference step for the curvature estimate
  double lambda_init = 5e-7;  // initial Levenberg-Marquardt scale
  double gradient_tolerance = 1e-8;
  /// Conjugate directions restart to steepest descent after this many
  /// successful steps; 0 means the parameter count.
  std::size_t restart_period = 0;
};

enum class ScgStop { MaxIterations, GradientTolerance, Observer };

struct ScgIteration {
  int iteration = 0;     // 1-based
  bool accepted = false;
  double loss = 0.0;     // objective at the current (accepted) iterate
  double grad_norm = 0.0;
  double lambda = 0.0;
};

/// Called after every iteration with the current iterate; return false to stop.
using ScgObserver = std::function<bool(const ScgIteration&, std::span<const double> w)>;

struct ScgResult {
  std::vector<double> w;
  double loss = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  ScgStop stop = ScgStop::MaxIterations;
};

/// Moller's scaled conjugate gradient: conjugate directions, a one-sided
/// finite-difference Hessian-vector product in place of a line search, and a
/// trust-region style scale lambda raised or lowered from the ratio of actual
/// to predicted reduction. Only steps that do not increase f are accepted.
ScgResult scg_minimize(const Objective& objective, std::vector<double> w0, const ScgOptions& options,
                       const ScgObserver& observer = {});

}  // namespace sigver::ann
