#include "bprec/environment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "bprec/errors.hpp"
#include "bprec/quadrature.hpp"

namespace bprec {

namespace {

constexpr double kTargetQuadError = 1e-10;
constexpr int kMaxQuadOrder = 2048;
constexpr double kMaxExactSumMean = 9e15;  // stay inside exact doubles

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// ln(1 + e^x) without overflow.
double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

// M as a function of the latent draw; strictly increasing for b > 0.
double log_mean_at(const EnvironmentFamily& family, double g) {
  const double x = family.a() + family.b() * g;
  switch (family.kind()) {
    case FamilyKind::TwoPoint:
      return std::log1p(sigmoid(x));
    case FamilyKind::ShiftedPoisson:
    case FamilyKind::ShiftedGeometric:
      return softplus(x);
  }
  throw std::logic_error("unreachable family kind");
}

struct MomentPair {
  double mu;
  double var;
};

MomentPair moments_at_order(const EnvironmentFamily& family, int order) {
  const GaussHermite& rule = gauss_hermite(order);
  const double mu =
      gh_mean(rule, [&](double g) { return log_mean_at(family, g); });
  const double var = gh_mean(rule, [&](double g) {
    const double d = log_mean_at(family, g) - mu;
    return d * d;
  });
  return {mu, var};
}

}  // namespace

std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::TwoPoint:
      return "two-point";
    case FamilyKind::ShiftedPoisson:
      return "shifted-poisson";
    case FamilyKind::ShiftedGeometric:
      return "shifted-geometric";
  }
  throw std::logic_error("unreachable family kind");
}

FamilyKind family_kind_from_string(const std::string& name) {
  if (name == "two-point") return FamilyKind::TwoPoint;
  if (name == "shifted-poisson") return FamilyKind::ShiftedPoisson;
  if (name == "shifted-geometric") return FamilyKind::ShiftedGeometric;
  throw std::invalid_argument("unknown family kind '" + name +
                              "' (expected two-point, shifted-poisson or "
                              "shifted-geometric)");
}

EnvironmentFamily EnvironmentFamily::make(FamilyKind kind, double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw std::domain_error("EnvironmentFamily parameters must be finite");
  }
  if (!(b > 0.0)) {
    std::ostringstream os;
    os << "EnvironmentFamily requires b > 0 for a nondegenerate "
          "environment, got b = "
       << b << " (use EnvironmentFamily::degenerate for constant "
             "environments)";
    throw DegenerateEnvironmentError(os.str());
  }
  return EnvironmentFamily(kind, a, b);
}

EnvironmentFamily EnvironmentFamily::degenerate(FamilyKind kind, double a) {
  if (!std::isfinite(a)) {
    throw std::domain_error("EnvironmentFamily parameters must be finite");
  }
  return EnvironmentFamily(kind, a, 0.0);
}

CriticalityParams env_moments(const EnvironmentFamily& family, int quad_order) {
  if (family.is_degenerate()) {
    throw DegenerateEnvironmentError(
        "env_moments: constant environment (b = 0) has sigma = 0");
  }
  if (quad_order < 8) {
    std::ostringstream os;
    os << "env_moments requires quad_order >= 8, got " << quad_order;
    throw std::domain_error(os.str());
  }

  int order = quad_order;
  while (true) {
    const MomentPair half = moments_at_order(family, order / 2);
    const MomentPair full = moments_at_order(family, order);
    const double sigma = std::sqrt(full.var);
    const double sigma_half = std::sqrt(half.var);
    const double estimate = std::max(std::fabs(full.mu - half.mu),
                                     std::fabs(sigma - sigma_half));
    if (estimate <= kTargetQuadError) {
      return CriticalityParams{full.mu, sigma, order, estimate};
    }
    if (order >= kMaxQuadOrder) {
      std::ostringstream os;
      os << "env_moments did not converge: error estimate " << estimate
         << " at order " << order;
      throw PrecisionError(os.str());
    }
    order = std::min(order * 2, kMaxQuadOrder);
  }
}

PairCorrelation pair_correlation(const EnvironmentFamily& f1,
                                 const EnvironmentFamily& f2, double latent_r,
                                 int quad_order) {
  if (!(std::fabs(latent_r) <= 1.0)) {
    std::ostringstream os;
    os << "pair_correlation requires |latent_r| <= 1, got " << latent_r;
    throw std::domain_error(os.str());
  }
  if (f1.is_degenerate() || f2.is_degenerate()) {
    throw DegenerateEnvironmentError(
        "pair_correlation: both families must be nondegenerate");
  }
  if (latent_r == 0.0) return PairCorrelation{0.0, 0.0};

  const GaussHermite& rule = gauss_hermite(quad_order);
  const double mu1 = gh_mean(rule, [&](double g) { return log_mean_at(f1, g); });
  const double mu2 = gh_mean(rule, [&](double g) { return log_mean_at(f2, g); });
  const double var1 = gh_mean(rule, [&](double g) {
    const double d = log_mean_at(f1, g) - mu1;
    return d * d;
  });
  const double var2 = gh_mean(rule, [&](double g) {
    const double d = log_mean_at(f2, g) - mu2;
    return d * d;
  });
  const double cov = gh_mean_bivariate(rule, latent_r, [&](double g1, double g2) {
    return (log_mean_at(f1, g1) - mu1) * (log_mean_at(f2, g2) - mu2);
  });
  const double rho = cov / std::sqrt(var1 * var2);
  return PairCorrelation{latent_r, std::clamp(rho, -1.0, 1.0)};
}

EnvRealization sample_environment(const EnvironmentFamily& family, double g) {
  if (!std::isfinite(g)) {
    throw std::domain_error("sample_environment: latent draw must be finite");
  }
  const double x = family.a() + family.b() * g;
  EnvRealization real;
  real.kind = family.kind();
  real.link = g;
  switch (family.kind()) {
    case FamilyKind::TwoPoint: {
      const double theta = sigmoid(x);
      real.param = theta;
      real.mean = 1.0 + theta;
      real.log_mean = std::log1p(theta);
      break;
    }
    case FamilyKind::ShiftedPoisson: {
      const double lambda = std::exp(x);
      real.param = lambda;
      real.mean = 1.0 + lambda;
      real.log_mean = softplus(x);
      break;
    }
    case FamilyKind::ShiftedGeometric: {
      const double q = sigmoid(-x);
      real.param = q;
      real.mean = 1.0 / q;
      real.log_mean = softplus(x);
      break;
    }
  }
  return real;
}

std::uint64_t sample_offspring_sum(const EnvRealization& real, std::uint64_t k,
                                   Rng& rng) {
  if (k == 0) {
    throw std::domain_error(
        "sample_offspring_sum: k = 0 (extinction impossible under p0 = 0)");
  }
  if (static_cast<double>(k) * real.mean > kMaxExactSumMean) {
    std::ostringstream os;
    os << "sample_offspring_sum: expected sum " << static_cast<double>(k) * real.mean
       << " exceeds the exact integer range";
    throw PrecisionError(os.str());
  }
  switch (real.kind) {
    case FamilyKind::TwoPoint:
      return k + sample_binomial(rng, k, real.param);
    case FamilyKind::ShiftedPoisson:
      return k + sample_poisson(rng, static_cast<double>(k) * real.param);
    case FamilyKind::ShiftedGeometric:
      return k + sample_negative_binomial(rng, k, real.param);
  }
  throw std::logic_error("unreachable family kind");
}

}  // namespace bprec
