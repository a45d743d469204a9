#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace bprec {

// Gauss-Hermite rule for the physicists' weight e^{-x^2}.
// Sum of weights equals sqrt(pi).
struct GaussHermite {
  int order = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Returns the cached rule of the given order (1 <= order <= 2048).
// Nodes are computed once by Newton iteration on the orthonormal
// Hermite recurrence and shared; safe to call concurrently.
const GaussHermite& gauss_hermite(int order);

inline constexpr double kInvSqrtPi = 0.56418958354775628695;
inline constexpr double kSqrtTwo = 1.4142135623730950488;

// E[f(G)] for standard normal G, by substituting x -> sqrt(2) x into
// the physicists' rule.
template <typename F>
double gh_mean(const GaussHermite& rule, F&& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    acc += rule.weights[i] * f(kSqrtTwo * rule.nodes[i]);
  }
  return acc * kInvSqrtPi;
}

// E[f(G1, G2)] for a bivariate standard normal pair with correlation r,
// on the tensor grid (G1, G2) = (x, r x + sqrt(1-r^2) y).
template <typename F>
double gh_mean_bivariate(const GaussHermite& rule, double r, F&& f) {
  const double s = std::sqrt(std::max(0.0, 1.0 - r * r));
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double g1 = kSqrtTwo * rule.nodes[i];
    double inner = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const double g2 = r * g1 + s * kSqrtTwo * rule.nodes[j];
      inner += rule.weights[j] * f(g1, g2);
    }
    acc += rule.weights[i] * inner;
  }
  return acc * kInvSqrtPi * kInvSqrtPi;
}

}  // namespace bprec
