#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bprec {

// Confidence intervals and the two-sided test for the difference of
// criticality parameters, with sigma1, sigma2 and rho treated as known.

enum class IntervalMethod { MuDiff, SigmaSq };

std::string to_string(IntervalMethod method);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double level = 0.0;  // 1 - kappa
  IntervalMethod method = IntervalMethod::MuDiff;
  bool degenerate = false;  // zero-length observation (SigmaSq with d = 0)
  std::vector<std::string> warnings;
};

struct TestResult {
  double statistic = 0.0;  // R_{m,n} under mu1 - mu2 = 0
  double p_value = 1.0;    // 2 (1 - Phi(|statistic|))
  double reject_at = 0.0;
  bool decision = false;   // p_value < reject_at
  std::vector<std::string> warnings;
};

// Two-sided interval for mu1 - mu2 at confidence level 1 - kappa:
// center ln Z1/n - ln Z2/m, half-width V_{m,n,rho} Phi^{-1}(1 - kappa/2).
// The asymptotic validity conditions are advisory: a warning is attached
// when |ln kappa| exceeds ln(min(m,n)) or min(m,n)^{1/3}.
Interval ci_mu_diff(double log_z1, std::uint64_t n, double log_z2,
                    std::uint64_t m, double sigma1, double sigma2, double rho,
                    double kappa);

// Interval for sigma1^2 from two independent copies observed at the same
// generation n, via (ln Z1 - ln Z2)^2 / (2n) being asymptotically
// sigma1^2 chi^2(1).  Only valid for independent copies, so the caller
// must attest to that design explicitly; otherwise this throws.
Interval ci_sigma_sq(double log_z1, double log_z2, std::uint64_t n,
                     double kappa, bool independent_copies_attested);

// Two-sided test of mu1 = mu2 at the given level.  Rejects exactly when
// ci_mu_diff at kappa = level excludes zero.
TestResult test_mu_equal(double log_z1, std::uint64_t n, double log_z2,
                         std::uint64_t m, double sigma1, double sigma2,
                         double rho, double level);

}  // namespace bprec
