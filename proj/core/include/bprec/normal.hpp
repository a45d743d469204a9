#pragma once

#include <utility>

namespace bprec {

// Standard normal special functions used throughout the toolkit.
//
// All functions are pure and total on their stated domains; invalid
// arguments raise std::domain_error rather than returning NaN.

// Standard normal density.
double phi_pdf(double x);

// Standard normal distribution function Phi(x).
// Backed by the complementary error function, relative error ~1e-15.
// Throws std::domain_error on non-finite input.
double phi_cdf(double x);

// Upper tail 1 - Phi(x), computed without the cancellation that
// 1.0 - phi_cdf(x) suffers beyond x ~ 8.
double phi_tail(double x);

// Inverse of phi_cdf on (0, 1): bisection to a narrow bracket followed
// by Newton refinement, tolerance 1e-13 in x.
// Throws std::domain_error for p outside the open interval (0, 1).
double phi_quantile(double p);

// Small-p asymptotic expansion of the normal quantile,
//
//   Phi^{-1}(p) ~ -sqrt( ln(1/p^2) - ln ln(1/p^2) - ln(2*pi) ),
//
// valid as p -> 0.  Domain restricted to 0 < p < e^{-1} so the iterated
// logarithm is defined; additionally the radicand must be positive
// (it turns positive around p < 0.234).  Outside either restriction a
// std::domain_error with a diagnostic is thrown rather than silently
// extrapolating.
double phi_quantile_asymptotic(double p);

// q-quantile of the chi-squared distribution with one degree of
// freedom, i.e. of the square of a standard normal:
//   chi2_quantile_1df(q) = phi_quantile((1+q)/2)^2.
// Throws std::domain_error for q outside (0, 1).
double chi2_quantile_1df(double q);

// Two-sided envelope for the upper normal tail, for x >= 0:
//
//   e^{-x^2/2} / (sqrt(2*pi) (1+x))  <=  1 - Phi(x)  <=
//   e^{-x^2/2} / (sqrt(pi) (1+x)).
//
// Returns (lower, upper).  Throws std::domain_error for x < 0.
std::pair<double, double> normal_tail_bounds(double x);

}  // namespace bprec
