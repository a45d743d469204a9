#pragma once

#include <cstdint>
#include <string>

#include "bprec/rng.hpp"

namespace bprec {

// Parametric environment families.
//
// One generation's environment is driven by a latent standard normal g
// through the link a + b*g.  Every family guarantees at least one
// offspring per individual (p0 = 0), a conditional mean m >= 1 and
// hence M = ln m >= 0, and admits an exact sampler for the sum of k
// iid offspring draws:
//
//   TwoPoint          offspring in {1,2},  P(X=2) = theta = sigmoid(a+bg),
//                     m = 1+theta,         sum = k + Binomial(k, theta)
//   ShiftedPoisson    X = 1 + Poisson(lambda), lambda = e^{a+bg},
//                     m = 1+lambda,        sum = k + Poisson(k lambda)
//   ShiftedGeometric  X = 1 + Geometric(q) failures, q = sigmoid(-(a+bg)),
//                     m = 1/q = 1+e^{a+bg}, sum = k + NegBinomial(k, q)
//
// All three links make M strictly increasing in g, so a positive latent
// correlation always induces a positive correlation between the two
// processes' M values.
//
// Regularity, per family: TwoPoint has M bounded in [0, ln 2] and
// offspring bounded by 2, so every moment of M and of the normalized
// first generation is finite.  ShiftedPoisson and ShiftedGeometric have
// M = softplus(a+bg) with Gaussian g, hence exponential moments of M
// (E m^lambda < infinity for every lambda), and conditionally
// light-tailed offspring, so the normalized first generation keeps
// finite p-th moments for p > 1.  These are the conditions the normal
// approximation and its refinements rest on.

enum class FamilyKind { TwoPoint, ShiftedPoisson, ShiftedGeometric };

std::string to_string(FamilyKind kind);
FamilyKind family_kind_from_string(const std::string& name);

class EnvironmentFamily {
public:
  // The reference family TwoPoint(a = 0, b = 1).
  EnvironmentFamily() : EnvironmentFamily(FamilyKind::TwoPoint, 0.0, 1.0) {}

  // Nondegenerate family; throws DegenerateEnvironmentError unless
  // b > 0 and both parameters are finite.
  static EnvironmentFamily make(FamilyKind kind, double a, double b);

  // Constant environment (b = 0).  sigma would be zero, so moment and
  // correlation computations reject these; simulation accepts them,
  // which is what deterministic-environment tests rely on.
  static EnvironmentFamily degenerate(FamilyKind kind, double a);

  FamilyKind kind() const { return kind_; }
  double a() const { return a_; }
  double b() const { return b_; }
  bool is_degenerate() const { return b_ == 0.0; }

private:
  EnvironmentFamily(FamilyKind kind, double a, double b)
      : kind_(kind), a_(a), b_(b) {}

  FamilyKind kind_;
  double a_;
  double b_;
};

inline bool operator==(const EnvironmentFamily& x, const EnvironmentFamily& y) {
  return x.kind() == y.kind() && x.a() == y.a() && x.b() == y.b();
}

// One realized generation environment.
struct EnvRealization {
  FamilyKind kind;
  double link;      // the latent Gaussian draw g
  double param;     // theta / lambda / q depending on the family
  double mean;      // m >= 1
  double log_mean;  // M = ln m >= 0
};

// Criticality parameters mu = E[M], sigma = sd(M) of one family.
struct CriticalityParams {
  double mu = 0.0;
  double sigma = 0.0;
  int quad_order = 0;
  double quad_error_estimate = 0.0;
};

// Correlation rho between the two families' M values under a Gaussian
// copula with latent correlation latent_r.
struct PairCorrelation {
  double latent_r = 0.0;
  double rho = 0.0;
};

// Gauss-Hermite computation of (mu, sigma).  The error estimate is the
// change from the half-order rule; if it exceeds 1e-10 the order is
// doubled (up to 2048) before giving up with PrecisionError.
// Requires quad_order >= 8 and a nondegenerate family.
CriticalityParams env_moments(const EnvironmentFamily& family,
                              int quad_order = 64);

// rho = Cov(M1(G1), M2(G2)) / (sigma1 sigma2) with (G1, G2) bivariate
// standard normal of correlation latent_r, by a 2-D tensor rule of the
// same order.  latent_r = 0 returns rho = 0 exactly.
PairCorrelation pair_correlation(const EnvironmentFamily& f1,
                                 const EnvironmentFamily& f2, double latent_r,
                                 int quad_order = 64);

// Deterministic map from the latent draw g to the realized environment.
EnvRealization sample_environment(const EnvironmentFamily& family, double g);

// Sum of k iid offspring draws under the realized environment,
// distributed exactly as the k-fold convolution.  Result >= k always.
// k = 0 is a domain error (extinction is impossible when p0 = 0).
std::uint64_t sample_offspring_sum(const EnvRealization& real, std::uint64_t k,
                                   Rng& rng);

}  // namespace bprec
