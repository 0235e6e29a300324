#include <doctest.h>

#include <cmath>

#include "sigver/random.hpp"
#include "sigver/scg.hpp"

using namespace sigver;
using namespace sigver::ann;

namespace {

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

/// Multinomial logistic regression with a small L2 penalty on overlapping
/// Gaussian classes: strictly convex with a finite minimizer.
struct SoftmaxRegression {
  int n, d, k;
  std::vector<double> x;
  std::vector<int> y;
  double l2 = 1e-3;

  SoftmaxRegression(std::uint64_t seed, int n_, int d_, int k_) : n(n_), d(d_), k(k_) {
    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
      const int c = i % k;
      y.push_back(c);
      for (int j = 0; j < d; ++j) x.push_back(rng.normal(j == c ? 1.0 : 0.0, 1.0));
    }
  }

  // w: k x (d + 1), last column bias.
  double operator()(std::span<const double> w, std::span<double> g) const {
    std::fill(g.begin(), g.end(), 0.0);
    double loss = 0.0;
    std::vector<double> z(static_cast<std::size_t>(k));
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < k; ++c) {
        double a = w[static_cast<std::size_t>(c * (d + 1) + d)];
        for (int j = 0; j < d; ++j) a += w[static_cast<std::size_t>(c * (d + 1) + j)] * x[static_cast<std::size_t>(i * d + j)];
        z[static_cast<std::size_t>(c)] = a;
      }
      const double mx = *std::max_element(z.begin(), z.end());
      double s = 0.0;
      for (auto& v : z) s += (v = std::exp(v - mx));
      loss += -std::log(z[static_cast<std::size_t>(y[static_cast<std::size_t>(i)])] / s);
      for (int c = 0; c < k; ++c) {
        const double r = z[static_cast<std::size_t>(c)] / s - (c == y[static_cast<std::size_t>(i)] ? 1.0 : 0.0);
        for (int j = 0; j < d; ++j) g[static_cast<std::size_t>(c * (d + 1) + j)] += r * x[static_cast<std::size_t>(i * d + j)] / n;
        g[static_cast<std::size_t>(c * (d + 1) + d)] += r / n;
      }
    }
    loss /= n;
    for (std::size_t p = 0; p < w.size(); ++p) {
      loss += 0.5 * l2 * w[p] * w[p];
      g[p] += l2 * w[p];
    }
    return loss;
  }
};

}  // namespace

TEST_CASE("SCG minimizes a quadratic") {
  // f = 1/2 x'Ax - b'x with A = diag(1..6) + 0.5 * ones.
  const int n = 6;
  auto f = [&](std::span<const double> w, std::span<double> g) {
    double sum = 0.0;
    for (double v : w) sum += v;
    double val = 0.0;
    for (int i = 0; i < n; ++i) {
      const double ax = (i + 1) * w[static_cast<std::size_t>(i)] + 0.5 * sum;
      g[static_cast<std::size_t>(i)] = ax - 1.0;
      val += 0.5 * w[static_cast<std::size_t>(i)] * ax - w[static_cast<std::size_t>(i)];
    }
    return val;
  };
  ScgOptions opt;
  opt.max_iterations = 200;
  const auto r = scg_minimize(f, std::vector<double>(n, 0.0), opt);
  CHECK(r.stop == ScgStop::GradientTolerance);
  CHECK(r.grad_norm < 1e-8);
  std::vector<double> g(n);
  f(r.w, g);
  CHECK(norm(g) < 1e-8);
}

TEST_CASE("SCG converges on convex softmax regression") {
  const SoftmaxRegression problem(61, 300, 5, 3);
  ScgOptions opt;
  opt.max_iterations = 200;
  opt.gradient_tolerance = 1e-7;
  std::vector<double> losses;
  const auto r = scg_minimize(std::cref(problem), std::vector<double>(3 * 6, 0.0), opt,
                              [&](const ScgIteration& it, std::span<const double>) {
                                losses.push_back(it.loss);
                                return true;
                              });
  std::vector<double> g(r.w.size());
  problem(r.w, g);
  CHECK(norm(g) < 1e-6);
  CHECK(r.iterations <= 200);
  for (std::size_t i = 1; i < losses.size(); ++i) CHECK(losses[i] <= losses[i - 1]);

  const auto again = scg_minimize(std::cref(problem), std::vector<double>(3 * 6, 0.0), opt);
  CHECK(again.w == r.w);
}

TEST_CASE("observer can stop the run") {
  const SoftmaxRegression problem(62, 60, 3, 2);
  int calls = 0;
  const auto r = scg_minimize(std::cref(problem), std::vector<double>(8, 0.0), ScgOptions{},
                              [&](const ScgIteration& it, std::span<const double>) {
                                ++calls;
                                return it.iteration < 5;
                              });
  CHECK(r.stop == ScgStop::Observer);
  CHECK(calls == 5);
  CHECK(r.iterations == 5);
}

TEST_CASE("SCG returns immediately at a stationary point") {
  auto f = [](std::span<const double> w, std::span<double> g) {
    g[0] = 2 * w[0];
    return w[0] * w[0];
  };
  const auto r = scg_minimize(f, std::vector<double>{0.0}, ScgOptions{});
  CHECK(r.stop == ScgStop::GradientTolerance);
  CHECK(r.iterations == 0);
  CHECK(r.w[0] == 0.0);
}
