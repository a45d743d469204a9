#pragma once

#include <cstdint>

#include "bprec/simulate.hpp"

namespace bprec {

// The two-sample criticality comparison statistic
//
//   R_{m,n} = ( ln Z_{1,n}/n - ln Z_{2,m}/m - (mu1 - mu2) ) / V_{m,n,rho}
//
// with the standard deviation normalizer
//
//   V_{m,n,rho} = sqrt( sigma1^2/n + sigma2^2/m
//                       - 2 rho sigma1 sigma2 (m^n)/(m n) ),
//
// where (m^n) is min(m, n).  R is asymptotically standard normal as
// min(m, n) grows.

struct StatisticInputs {
  double log_z1 = 0.0;
  double log_z2 = 0.0;
  double mu1 = 0.0;
  double mu2 = 0.0;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double rho = 0.0;
};

struct ComparisonStatistic {
  double r = 0.0;
  double v = 0.0;
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  StatisticInputs inputs;
};

// Additive decomposition of R into the centered environment terms and
// the two normalized-martingale corrections:
//
//   R = sum_i eta_i + ln W_{1,n}/(n V) - ln W_{2,m}/(m V),
//
// where eta_i = (M_{1,i-1} - mu1)/(n V) for the first process and
// -(M_{2,j-1} - mu2)/(m V) for the second.  The reconstruction is an
// algebraic identity and must hold to rounding.
struct Decomposition {
  double eta_sum = 0.0;
  double w1_term = 0.0;
  double w2_term = 0.0;

  double reconstructed() const { return eta_sum + w1_term - w2_term; }
};

// V_{m,n,rho}.  Requires n, m >= 1, sigma1, sigma2 > 0, |rho| <= 1.
// The excluded degenerate combination (rho = 1, sigma1 = sigma2, n = m)
// yields a zero variance and raises DegenerateVarianceError.
double v_mn_rho(std::uint64_t n, std::uint64_t m, double sigma1, double sigma2,
                double rho);

// R_{m,n} from the two observed log populations and known parameters.
ComparisonStatistic r_statistic(double log_z1, std::uint64_t n, double log_z2,
                                std::uint64_t m, double mu1, double mu2,
                                double sigma1, double sigma2, double rho);

// Single-process standardization (ln Z - n mu)/(sigma sqrt(n)), the
// m -> infinity limit of R_{m,n}.
double single_process_statistic(double log_z, std::uint64_t n, double mu,
                                double sigma);

// Decomposition of the statistic of a simulated pair; requires the pair
// to have been simulated with per-generation paths retained.
Decomposition decompose(const PairedTrajectory& pair, double mu1, double mu2,
                        double sigma1, double sigma2, double rho);

}  // namespace bprec
