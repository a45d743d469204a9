#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "bprec/normal.hpp"

// Shared oracles and helpers for the test suites.  Everything here is
// independent of the library code paths it is used to check.

namespace testutil {

inline double simpson(const std::function<double(double)>& f, double a,
                      double b) {
  const double c = 0.5 * (a + b);
  return (b - a) / 6.0 * (f(a) + 4.0 * f(c) + f(b));
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double b, double eps, double whole,
                                   int depth) {
  const double c = 0.5 * (a + b);
  const double left = simpson(f, a, c);
  const double right = simpson(f, c, b);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * eps) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson_rec(f, a, c, 0.5 * eps, left, depth - 1) +
         adaptive_simpson_rec(f, c, b, 0.5 * eps, right, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double eps) {
  return adaptive_simpson_rec(f, a, b, eps, simpson(f, a, b), 48);
}

// Independent oracle for the standard normal CDF: adaptive integration
// of the density from 0, plus symmetry.
inline double oracle_phi_cdf(double x) {
  if (x < 0.0) return 1.0 - oracle_phi_cdf(-x);
  if (x > 40.0) return 1.0;
  const auto density = [](double t) {
    return 0.39894228040143267794 * std::exp(-0.5 * t * t);
  };
  return 0.5 + adaptive_simpson(density, 0.0, x, 1e-14);
}

// Quantile oracle: plain bisection on oracle_phi_cdf.
inline double oracle_phi_quantile(double p, double tol = 1e-9) {
  double lo = -40.0;
  double hi = 40.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (oracle_phi_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // population variance
  double sd() const { return std::sqrt(variance); }
  double se() const { return sd() / std::sqrt(static_cast<double>(count)); }
};

inline Summary summarize(const std::vector<double>& xs) {
  Summary s;
  double m2 = 0.0;
  for (double x : xs) {
    ++s.count;
    const double d1 = x - s.mean;
    s.mean += d1 / static_cast<double>(s.count);
    m2 += d1 * (x - s.mean);
  }
  if (s.count > 0) s.variance = m2 / static_cast<double>(s.count);
  return s;
}

// Wilson-Hilferty approximation to chi-squared quantiles, good enough
// for goodness-of-fit envelopes at moderate df.
inline double chi2_quantile_wh(double q, double df) {
  const double z = bprec::phi_quantile(q);
  const double a = 2.0 / (9.0 * df);
  const double c = 1.0 - a + z * std::sqrt(a);
  return df * c * c * c;
}

// Two-sample Kolmogorov-Smirnov distance (both inputs sorted).
inline double ks_two_sample(const std::vector<double>& a,
                            const std::vector<double>& b) {
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) {
      ++i;
    } else {
      ++j;
    }
    d = std::max(d, std::fabs(static_cast<double>(i) / na -
                              static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace testutil
