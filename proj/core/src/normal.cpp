#include "bprec/normal.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace bprec {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kLn2Pi = 1.8378770664093454836;

void require_finite(double x, const char* name) {
  if (!std::isfinite(x)) {
    std::ostringstream os;
    os << name << " must be finite, got " << x;
    throw std::domain_error(os.str());
  }
}

}  // namespace

double phi_pdf(double x) {
  require_finite(x, "phi_pdf argument");
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double phi_cdf(double x) {
  require_finite(x, "phi_cdf argument");
  // Phi(x) = erfc(-x / sqrt(2)) / 2.  erfc keeps full relative accuracy
  // in the lower tail, and the reflection keeps it in the upper tail.
  return 0.5 * std::erfc(-x / kSqrt2);
}

double phi_tail(double x) {
  require_finite(x, "phi_tail argument");
  return 0.5 * std::erfc(x / kSqrt2);
}

double phi_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    std::ostringstream os;
    os << "phi_quantile requires p in (0,1), got " << p;
    throw std::domain_error(os.str());
  }
  if (p > 0.5) return -phi_quantile(1.0 - p);
  if (p == 0.5) return 0.0;

  // p in (0, 0.5): the quantile lies in [-39, 0].  Phi(-39) ~ 1e-333 is
  // below any representable positive p, so the bracket always holds.
  double lo = -39.0;
  double hi = 0.0;
  for (int i = 0; i < 45; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (phi_cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  // Newton refinement; the density is strictly positive so the iteration
  // is well defined, and the bracket start makes it contract quickly.
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 8; ++i) {
    const double f = phi_cdf(x) - p;
    const double d = phi_pdf(x);
    if (d <= 0.0) break;
    const double step = f / d;
    x -= step;
    if (std::fabs(step) < 1e-13 * (1.0 + std::fabs(x))) break;
  }
  return x;
}

double phi_quantile_asymptotic(double p) {
  constexpr double kExpMinusOne = 0.36787944117144232160;
  if (!(p > 0.0 && p < kExpMinusOne)) {
    std::ostringstream os;
    os << "phi_quantile_asymptotic requires 0 < p < e^-1 ~ 0.3679, got "
       << p;
    throw std::domain_error(os.str());
  }
  const double u = std::log(1.0 / (p * p));  // = -2 ln p > 2
  const double radicand = u - std::log(u) - kLn2Pi;
  if (radicand <= 0.0) {
    std::ostringstream os;
    os << "phi_quantile_asymptotic radicand " << radicand
       << " <= 0 at p = " << p
       << " (expansion only valid deeper in the tail, p < ~0.234)";
    throw std::domain_error(os.str());
  }
  return -std::sqrt(radicand);
}

double chi2_quantile_1df(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    std::ostringstream os;
    os << "chi2_quantile_1df requires q in (0,1), got " << q;
    throw std::domain_error(os.str());
  }
  const double z = phi_quantile(0.5 * (1.0 + q));
  return z * z;
}

std::pair<double, double> normal_tail_bounds(double x) {
  require_finite(x, "normal_tail_bounds argument");
  if (x < 0.0) {
    std::ostringstream os;
    os << "normal_tail_bounds requires x >= 0, got " << x;
    throw std::domain_error(os.str());
  }
  const double e = std::exp(-0.5 * x * x);
  const double lower = e / (std::sqrt(2.0 * M_PI) * (1.0 + x));
  const double upper = e / (std::sqrt(M_PI) * (1.0 + x));
  return {lower, upper};
}

}  // namespace bprec
