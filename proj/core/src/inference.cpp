#include "bprec/inference.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "bprec/normal.hpp"
#include "bprec/statistic.hpp"

namespace bprec {

namespace {

void check_kappa(double kappa) {
  if (!(kappa > 0.0 && kappa < 1.0)) {
    std::ostringstream os;
    os << "confidence parameter kappa must lie in (0,1), got " << kappa;
    throw std::domain_error(os.str());
  }
}

// Advisory checks of the asymptotic validity window; heuristic
// thresholds, never hard errors.
std::vector<std::string> validity_warnings(double kappa, std::uint64_t n,
                                           std::uint64_t m) {
  std::vector<std::string> warnings;
  const double shared = static_cast<double>(std::min(n, m));
  const double abs_log_kappa = std::fabs(std::log(kappa));
  if (abs_log_kappa > std::log(shared)) {
    std::ostringstream os;
    os << "|ln kappa| = " << abs_log_kappa << " exceeds ln(min(m,n)) = "
       << std::log(shared)
       << "; the stated level needs larger samples in the moment-condition "
          "regime";
    warnings.push_back(os.str());
  }
  if (abs_log_kappa > std::cbrt(shared)) {
    std::ostringstream os;
    os << "|ln kappa| = " << abs_log_kappa << " exceeds min(m,n)^(1/3) = "
       << std::cbrt(shared)
       << "; the stated level needs larger samples even in the "
          "exponential-moment regime";
    warnings.push_back(os.str());
  }
  return warnings;
}

}  // namespace

std::string to_string(IntervalMethod method) {
  return method == IntervalMethod::MuDiff ? "mu-diff" : "sigma-sq";
}

Interval ci_mu_diff(double log_z1, std::uint64_t n, double log_z2,
                    std::uint64_t m, double sigma1, double sigma2, double rho,
                    double kappa) {
  check_kappa(kappa);
  const double v = v_mn_rho(n, m, sigma1, sigma2, rho);
  const double center =
      log_z1 / static_cast<double>(n) - log_z2 / static_cast<double>(m);
  const double half_width = v * phi_quantile(1.0 - 0.5 * kappa);

  Interval interval;
  interval.method = IntervalMethod::MuDiff;
  interval.level = 1.0 - kappa;
  interval.lo = center - half_width;
  interval.hi = center + half_width;
  interval.warnings = validity_warnings(kappa, n, m);
  return interval;
}

Interval ci_sigma_sq(double log_z1, double log_z2, std::uint64_t n,
                     double kappa, bool independent_copies_attested) {
  if (!independent_copies_attested) {
    throw std::invalid_argument(
        "ci_sigma_sq is only valid when the second process is an independent "
        "copy of the first; pass the attestation flag to confirm that design");
  }
  if (n < 1) throw std::domain_error("ci_sigma_sq requires n >= 1");
  check_kappa(kappa);

  Interval interval;
  interval.method = IntervalMethod::SigmaSq;
  interval.level = 1.0 - kappa;
  interval.warnings = validity_warnings(kappa, n, n);

  const double d = log_z1 - log_z2;
  if (d == 0.0) {
    interval.lo = 0.0;
    interval.hi = 0.0;
    interval.degenerate = true;
    interval.warnings.push_back(
        "degenerate observation ln Z1 = ln Z2: the interval collapses to "
        "[0, 0]");
    return interval;
  }
  const double d2 = d * d;
  const double two_n = 2.0 * static_cast<double>(n);
  interval.lo = d2 / (two_n * chi2_quantile_1df(1.0 - 0.5 * kappa));
  interval.hi = d2 / (two_n * chi2_quantile_1df(0.5 * kappa));
  return interval;
}

TestResult test_mu_equal(double log_z1, std::uint64_t n, double log_z2,
                         std::uint64_t m, double sigma1, double sigma2,
                         double rho, double level) {
  check_kappa(level);
  const ComparisonStatistic stat =
      r_statistic(log_z1, n, log_z2, m, 0.0, 0.0, sigma1, sigma2, rho);

  TestResult result;
  result.statistic = stat.r;
  result.p_value = 2.0 * (1.0 - phi_cdf(std::fabs(stat.r)));
  result.reject_at = level;
  result.decision = result.p_value < level;
  result.warnings = validity_warnings(level, n, m);
  return result;
}

}  // namespace bprec
