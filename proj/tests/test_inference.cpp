#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "bprec/errors.hpp"
#include "bprec/inference.hpp"
#include "bprec/rng.hpp"
#include "bprec/simulate.hpp"

using namespace bprec;

TEST_CASE("ci_mu_diff worked example") {
  const Interval ci = ci_mu_diff(105.0, 100, 98.0, 100, 1.0, 1.0, 0.0, 0.05);
  CHECK(ci.lo == doctest::Approx(-0.20718).epsilon(1e-4));
  CHECK(ci.hi == doctest::Approx(0.34718).epsilon(1e-4));
  CHECK(ci.level == doctest::Approx(0.95));
  CHECK(ci.method == IntervalMethod::MuDiff);
  CHECK(ci.warnings.empty());
}

TEST_CASE("ci_mu_diff width behaviour") {
  const auto width = [](const Interval& ci) { return ci.hi - ci.lo; };
  // kappa -> 1 collapses the interval to the point estimate
  CHECK(width(ci_mu_diff(105.0, 100, 98.0, 100, 1.0, 1.0, 0.0, 0.999999)) <=
        1e-5);
  // smaller kappa (higher confidence) widens it
  const double w05 = width(ci_mu_diff(105.0, 100, 98.0, 100, 1.0, 1.0, 0.0, 0.05));
  const double w01 = width(ci_mu_diff(105.0, 100, 98.0, 100, 1.0, 1.0, 0.0, 0.01));
  CHECK(w01 > w05);
  // more generations narrow it
  const double w_long =
      width(ci_mu_diff(1050.0, 1000, 980.0, 1000, 1.0, 1.0, 0.0, 0.05));
  CHECK(w_long < w05);
}

TEST_CASE("ci_mu_diff validation") {
  CHECK_THROWS_AS(ci_mu_diff(105.0, 100, 98.0, 100, 1.0, 1.0, 0.0, 0.0),
                  std::domain_error);
  CHECK_THROWS_AS(ci_mu_diff(105.0, 100, 98.0, 100, 1.0, 1.0, 0.0, 1.0),
                  std::domain_error);
  CHECK_THROWS_AS(ci_mu_diff(105.0, 100, 98.0, 100, 1.0, 1.0, 1.0, 0.05),
                  DegenerateVarianceError);
}

TEST_CASE("ci_sigma_sq worked example") {
  const Interval ci = ci_sigma_sq(52.0, 50.0, 100, 0.05, true);
  CHECK(ci.lo == doctest::Approx(0.003981).epsilon(1e-3));
  CHECK(ci.hi == doctest::Approx(20.37).epsilon(1e-3));
  CHECK(ci.method == IntervalMethod::SigmaSq);
  CHECK(ci.lo <= ci.hi);
  CHECK_FALSE(ci.degenerate);
}

TEST_CASE("ci_sigma_sq requires the independent-copy attestation") {
  CHECK_THROWS_AS(ci_sigma_sq(52.0, 50.0, 100, 0.05, false),
                  std::invalid_argument);
}

TEST_CASE("ci_sigma_sq degenerate observation") {
  const Interval ci = ci_sigma_sq(50.0, 50.0, 100, 0.05, true);
  CHECK(ci.lo == 0.0);
  CHECK(ci.hi == 0.0);
  CHECK(ci.degenerate);
  CHECK_FALSE(ci.warnings.empty());
}

TEST_CASE("ci_sigma_sq scales exactly as the squared observation") {
  const Interval base = ci_sigma_sq(51.0, 50.0, 100, 0.05, true);
  const Interval doubled = ci_sigma_sq(52.0, 50.0, 100, 0.05, true);
  CHECK(doubled.lo == 4.0 * base.lo);
  CHECK(doubled.hi == 4.0 * base.hi);
  CHECK(base.lo >= 0.0);
}

TEST_CASE("test_mu_equal basics") {
  const TestResult equal = test_mu_equal(120.0, 100, 240.0, 200, 1.0, 1.0, 0.0, 0.05);
  CHECK(equal.statistic == 0.0);
  CHECK(equal.p_value == 1.0);
  CHECK_FALSE(equal.decision);

  // inputs tuned so the statistic is the 97.5% quantile
  const double delta = 1.959964 * std::sqrt(0.02) * 100.0;
  const TestResult edge =
      test_mu_equal(50.0 + delta, 100, 50.0, 100, 1.0, 1.0, 0.0, 0.05);
  CHECK(edge.statistic == doctest::Approx(1.959964).epsilon(1e-9));
  CHECK(edge.p_value == doctest::Approx(0.05).epsilon(1e-5));
}

TEST_CASE("test/interval duality") {
  Rng rng(81);
  for (int i = 0; i < 1000; ++i) {
    const double log_z1 = 300.0 * rng.next_double();
    const double log_z2 = 300.0 * rng.next_double();
    const std::uint64_t n = 50 + (rng.next_u64() % 1000);
    const std::uint64_t m = 50 + (rng.next_u64() % 1000);
    const double s1 = 0.1 + rng.next_double();
    const double s2 = 0.1 + rng.next_double();
    const double rho = 1.8 * rng.next_double() - 0.9;
    const double kappa = 0.01 + 0.6 * rng.next_double();
    const TestResult t = test_mu_equal(log_z1, n, log_z2, m, s1, s2, rho, kappa);
    const Interval ci = ci_mu_diff(log_z1, n, log_z2, m, s1, s2, rho, kappa);
    const bool zero_outside = 0.0 < ci.lo || 0.0 > ci.hi;
    CHECK(t.decision == zero_outside);
  }
}

TEST_CASE("advisory warnings fire when kappa is extreme for the sample") {
  const Interval fine = ci_mu_diff(105.0, 1000, 98.0, 1000, 1.0, 1.0, 0.0, 0.05);
  CHECK(fine.warnings.empty());
  const Interval extreme = ci_mu_diff(105.0, 50, 98.0, 50, 1.0, 1.0, 0.0, 1e-6);
  CHECK(extreme.warnings.size() == 2);  // both validity regimes exceeded
  // |ln 0.0003| = 8.1 sits between ln(1000) = 6.9 and 1000^(1/3) = 10
  const Interval mid = ci_mu_diff(105.0, 1000, 98.0, 1000, 1.0, 1.0, 0.0, 3e-4);
  CHECK(mid.warnings.size() == 1);
}

TEST_CASE("small Monte Carlo size check under the null") {
  SimConfig cfg;
  cfg.family1 = EnvironmentFamily::make(FamilyKind::TwoPoint, 0.0, 1.0);
  cfg.family2 = cfg.family1;
  cfg.latent_r = 0.0;
  cfg.n = 300;
  cfg.m = 300;
  cfg.master_seed = 82;
  cfg.replications = 2'000;
  const auto p = env_moments(cfg.family1);
  const auto rejections = replicate_map<char>(
      cfg, 0, false, [&](std::uint64_t, const PairedTrajectory& pair) {
        const TestResult t =
            test_mu_equal(pair.traj1.log_z, cfg.n, pair.traj2.log_z, cfg.m,
                          p.sigma, p.sigma, 0.0, 0.05);
        return static_cast<char>(t.decision);
      });
  double rate = 0.0;
  for (char c : rejections) rate += c;
  rate /= static_cast<double>(rejections.size());
  // 3 SE band around 0.05 at N = 2000 is roughly +-0.015
  CHECK(rate > 0.03);
  CHECK(rate < 0.07);
}
