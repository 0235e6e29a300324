#include "sigver/scg.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "sigver/error.hpp"

namespace sigver::ann {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

ScgResult scg_minimize(const Objective& objective, std::vector<double> w0, const ScgOptions& options,
                       const ScgObserver& observer) {
  if (options.sigma <= 0 || options.lambda_init <= 0)
    throw Error(ErrorCode::InvalidArgument, "sigma and lambda must be positive");
  const std::size_t n = w0.size();
  const std::size_t restart = options.restart_period == 0 ? n : options.restart_period;
  constexpr double kLambdaMax = 1e100;
  constexpr double kLambdaMin = 1e-15;

  ScgResult result;
  result.w = std::move(w0);
  auto& w = result.w;

  std::vector<double> grad(n), r(n), p(n), w_trial(n), grad_trial(n), grad_plus(n);
  double f = objective(w, grad);
  if (!std::isfinite(f)) throw Error(ErrorCode::NonFiniteInput, "objective is not finite at the start point");
  for (std::size_t i = 0; i < n; ++i) r[i] = -grad[i];
  p = r;

  double lambda = options.lambda_init;
  double curvature = 0.0;  // p . (H p), without the lambda term
  bool success = true;
  std::size_t successes = 0;

  result.loss = f;
  result.grad_norm = std::sqrt(dot(r, r));
  for (int it = 1; it <= options.max_iterations; ++it) {
    if (result.grad_norm < options.gradient_tolerance) {
      result.stop = ScgStop::GradientTolerance;
      return result;
    }

    double mu = dot(p, r);
    if (mu <= 0.0) {
      // Not a descent direction; fall back to steepest descent.
      p = r;
      mu = dot(p, r);
      success = true;
    }
    const double pp = dot(p, p);

    if (success) {
      const double step = options.sigma / std::sqrt(pp);
      for (std::size_t i = 0; i < n; ++i) w_trial[i] = w[i] + step * p[i];
      objective(w_trial, grad_plus);
      // s = (E'(w + step p) - E'(w)) / step
      curvature = 0.0;
      for (std::size_t i = 0; i < n; ++i) curvature += p[i] * (grad_plus[i] - grad[i]) / step;
    }

    double delta = curvature + lambda * pp;
    if (delta <= 0.0) {
      // Make the scaled Hessian positive definite along p.
      lambda = 2.0 * (lambda - delta / pp);
      delta = curvature + lambda * pp;
    }

    const double alpha = mu / delta;
    for (std::size_t i = 0; i < n; ++i) w_trial[i] = w[i] + alpha * p[i];
    const double f_trial = objective(w_trial, grad_trial);
    const double comparison =
        std::isfinite(f_trial) ? 2.0 * delta * (f - f_trial) / (mu * mu) : -std::numeric_limits<double>::infinity();

    const bool accepted = comparison >= 0.0;
    if (accepted) {
      w.swap(w_trial);
      f = f_trial;
      grad.swap(grad_trial);
      ++successes;
      double rr_new = 0.0;
      double rr_cross = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double rn = -grad[i];
        rr_new += rn * rn;
        rr_cross += rn * r[i];
        r[i] = rn;
      }
      if (successes % restart == 0) {
        p = r;
      } else {
        const double beta = (rr_new - rr_cross) / mu;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
      }
      success = true;
      if (comparison >= 0.75) lambda = std::max(lambda / 4.0, kLambdaMin);
    } else {
      success = false;
    }
    if (comparison < 0.25) {
      const double raise = std::isfinite(comparison) ? delta * (1.0 - comparison) / pp : lambda * 4.0;
      lambda = std::min(lambda + raise, kLambdaMax);
    }

    result.loss = f;
    result.grad_norm = std::sqrt(dot(r, r));
    result.iterations = it;
    if (observer) {
      const ScgIteration info{it, accepted, f, result.grad_norm, lambda};
      if (!observer(info, w)) {
        result.stop = ScgStop::Observer;
        return result;
      }
    }
  }
  result.stop = result.grad_norm < options.gradient_tolerance ? ScgStop::GradientTolerance : ScgStop::MaxIterations;
  return result;
}

}  // namespace sigver::ann
