#include "bprec/statistic.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "bprec/errors.hpp"

namespace bprec {

namespace {

void check_v_inputs(std::uint64_t n, std::uint64_t m, double sigma1,
                    double sigma2, double rho) {
  if (n < 1 || m < 1) {
    throw std::domain_error("v_mn_rho requires n, m >= 1");
  }
  if (!(sigma1 > 0.0) || !(sigma2 > 0.0)) {
    std::ostringstream os;
    os << "v_mn_rho requires sigma1, sigma2 > 0, got " << sigma1 << ", "
       << sigma2;
    throw std::domain_error(os.str());
  }
  if (!(std::fabs(rho) <= 1.0)) {
    std::ostringstream os;
    os << "v_mn_rho requires rho in [-1,1], got " << rho;
    throw std::domain_error(os.str());
  }
}

// Compensated summation.
class KahanSum {
public:
  void add(double x) {
    const double y = x - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace

double v_mn_rho(std::uint64_t n, std::uint64_t m, double sigma1, double sigma2,
                double rho) {
  check_v_inputs(n, m, sigma1, sigma2, rho);
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  const double shared = static_cast<double>(std::min(n, m));
  // Grouping (sigma1*sigma2) keeps V bit-identical under a process
  // swap, which makes the statistic's antisymmetry exact.
  const double v2 = sigma1 * sigma1 / dn + sigma2 * sigma2 / dm -
                    2.0 * rho * (sigma1 * sigma2) * shared / (dm * dn);
  if (!(v2 > 0.0)) {
    std::ostringstream os;
    os << "degenerate variance V^2 = " << v2 << " (n = " << n << ", m = " << m
       << ", sigma1 = " << sigma1 << ", sigma2 = " << sigma2
       << ", rho = " << rho
       << "): the standing assumption excludes rho = 1 with sigma1 = sigma2 "
          "and n = m";
    throw DegenerateVarianceError(os.str());
  }
  return std::sqrt(v2);
}

ComparisonStatistic r_statistic(double log_z1, std::uint64_t n, double log_z2,
                                std::uint64_t m, double mu1, double mu2,
                                double sigma1, double sigma2, double rho) {
  if (!(log_z1 >= 0.0) || !(log_z2 >= 0.0)) {
    std::ostringstream os;
    os << "r_statistic requires log populations >= 0 (Z >= 1), got " << log_z1
       << ", " << log_z2;
    throw std::domain_error(os.str());
  }
  const double v = v_mn_rho(n, m, sigma1, sigma2, rho);
  ComparisonStatistic stat;
  stat.v = v;
  stat.n = n;
  stat.m = m;
  stat.inputs = StatisticInputs{log_z1, log_z2, mu1, mu2, sigma1, sigma2, rho};
  stat.r = (log_z1 / static_cast<double>(n) - log_z2 / static_cast<double>(m) -
            (mu1 - mu2)) /
           v;
  return stat;
}

double single_process_statistic(double log_z, std::uint64_t n, double mu,
                                double sigma) {
  if (n < 1) throw std::domain_error("single_process_statistic requires n >= 1");
  if (!(sigma > 0.0)) {
    throw std::domain_error("single_process_statistic requires sigma > 0");
  }
  return (log_z - static_cast<double>(n) * mu) /
         (sigma * std::sqrt(static_cast<double>(n)));
}

Decomposition decompose(const PairedTrajectory& pair, double mu1, double mu2,
                        double sigma1, double sigma2, double rho) {
  const Trajectory& t1 = pair.traj1;
  const Trajectory& t2 = pair.traj2;
  if (t1.m_path.size() != t1.generations || t2.m_path.size() != t2.generations) {
    std::ostringstream os;
    os << "decompose: per-generation paths missing or of mismatched length ("
       << t1.m_path.size() << " vs " << t1.generations << ", "
       << t2.m_path.size() << " vs " << t2.generations << ")";
    throw std::domain_error(os.str());
  }

  const double v = v_mn_rho(t1.generations, t2.generations, sigma1, sigma2, rho);
  const double nv = static_cast<double>(t1.generations) * v;
  const double mv = static_cast<double>(t2.generations) * v;

  KahanSum eta;
  for (double mean : t1.m_path) eta.add((std::log(mean) - mu1) / nv);
  for (double mean : t2.m_path) eta.add(-(std::log(mean) - mu2) / mv);

  Decomposition decomp;
  decomp.eta_sum = eta.value();
  decomp.w1_term = t1.log_w / nv;
  decomp.w2_term = t2.log_w / mv;
  return decomp;
}

}  // namespace bprec
