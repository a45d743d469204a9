#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bprec/environment.hpp"
#include "bprec/errors.hpp"
#include "bprec/rng.hpp"
#include "test_util.hpp"

using namespace bprec;

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double log_binomial_coefficient(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Chi-square goodness of fit of `draws` (counts of S - k) against pmf,
// lumping the right tail so every bin has expected count >= 10.
void check_gof(const std::vector<std::uint64_t>& draws,
               const std::function<double(std::uint64_t)>& pmf,
               double significance) {
  std::uint64_t max_draw = 0;
  for (auto d : draws) max_draw = std::max(max_draw, d);
  std::vector<double> observed(max_draw + 2, 0.0);
  for (auto d : draws) observed[d] += 1.0;

  const double total = static_cast<double>(draws.size());
  double chi2 = 0.0;
  int bins = 0;
  double lump_obs = 0.0;
  double lump_exp = 0.0;
  double cumulative = 0.0;
  for (std::uint64_t j = 0; j <= max_draw + 1; ++j) {
    const double expected = total * pmf(j);
    cumulative += pmf(j);
    lump_obs += observed[j];
    lump_exp += expected;
    const bool last = j == max_draw + 1;
    if (lump_exp >= 10.0 && (!last || bins == 0)) {
      chi2 += (lump_obs - lump_exp) * (lump_obs - lump_exp) / lump_exp;
      ++bins;
      lump_obs = 0.0;
      lump_exp = 0.0;
    }
  }
  // whatever mass sits beyond the largest draw
  lump_obs += 0.0;
  lump_exp += total * (1.0 - cumulative);
  if (lump_exp > 10.0) {
    chi2 += (lump_obs - lump_exp) * (lump_obs - lump_exp) / lump_exp;
    ++bins;
  }
  REQUIRE(bins >= 2);
  const double threshold = testutil::chi2_quantile_wh(1.0 - significance,
                                                      static_cast<double>(bins - 1));
  INFO("chi2 = " << chi2 << " threshold = " << threshold << " bins = " << bins);
  CHECK(chi2 <= threshold);
}

}  // namespace

TEST_CASE("link maps at the origin") {
  const auto two_point = sample_environment(
      EnvironmentFamily::make(FamilyKind::TwoPoint, 0.0, 1.0), 0.0);
  CHECK(two_point.param == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(two_point.mean == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(two_point.log_mean == doctest::Approx(std::log(1.5)).epsilon(1e-15));

  const auto poisson = sample_environment(
      EnvironmentFamily::make(FamilyKind::ShiftedPoisson, 0.0, 1.0), 0.0);
  CHECK(poisson.param == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(poisson.mean == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(poisson.log_mean == doctest::Approx(std::log(2.0)).epsilon(1e-15));

  const auto geometric = sample_environment(
      EnvironmentFamily::make(FamilyKind::ShiftedGeometric, 0.0, 1.0), 0.0);
  CHECK(geometric.param == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(geometric.mean == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("every realization has m >= 1 and M >= 0") {
  Rng rng(404);
  for (FamilyKind kind : {FamilyKind::TwoPoint, FamilyKind::ShiftedPoisson,
                          FamilyKind::ShiftedGeometric}) {
    const auto family = EnvironmentFamily::make(kind, -1.0, 2.0);
    for (int i = 0; i < 2000; ++i) {
      const auto real = sample_environment(family, rng.next_normal());
      CHECK(real.mean >= 1.0);
      CHECK(real.log_mean >= 0.0);
    }
  }
  CHECK_THROWS_AS(sample_environment(EnvironmentFamily(), 1.0 / 0.0),
                  std::domain_error);
}

TEST_CASE("family construction validates") {
  CHECK_THROWS_AS(EnvironmentFamily::make(FamilyKind::TwoPoint, 0.0, 0.0),
                  DegenerateEnvironmentError);
  CHECK_THROWS_AS(EnvironmentFamily::make(FamilyKind::TwoPoint, 0.0, -1.0),
                  DegenerateEnvironmentError);
  CHECK_NOTHROW(EnvironmentFamily::degenerate(FamilyKind::TwoPoint, 3.0));
}

TEST_CASE("env_moments rejects degenerate families, small b tends to it") {
  CHECK_THROWS_AS(env_moments(EnvironmentFamily::degenerate(FamilyKind::TwoPoint, 0.0)),
                  DegenerateEnvironmentError);
  const auto nearly_constant =
      env_moments(EnvironmentFamily::make(FamilyKind::TwoPoint, 0.0, 1e-6));
  CHECK(nearly_constant.mu == doctest::Approx(std::log(1.5)).epsilon(1e-9));
  CHECK(nearly_constant.sigma <= 1e-6);
  CHECK_THROWS_AS(env_moments(EnvironmentFamily(), 4), std::domain_error);
}

TEST_CASE("env_moments matches Monte Carlo oracles") {
  constexpr std::size_t kCount = 10'000'000;
  Rng rng(stream_seed(777, 0));

  SUBCASE("TwoPoint(0,1)") {
    const auto params = env_moments(EnvironmentFamily::make(FamilyKind::TwoPoint, 0.0, 1.0));
    std::vector<double> values(kCount);
    for (auto& v : values) v = std::log1p(sigmoid(rng.next_normal()));
    const auto s = testutil::summarize(values);
    CHECK(std::fabs(params.mu - s.mean) <= 3.0 * s.se());
    // SE of the sample SD is about sd/sqrt(2N) for near-Gaussian data;
    // this M is bounded, so use a slightly generous 4x band.
    CHECK(std::fabs(params.sigma - s.sd()) <=
          4.0 * s.sd() / std::sqrt(2.0 * kCount));
    CHECK(params.quad_error_estimate <= 1e-10);
  }

  SUBCASE("ShiftedPoisson(0,0.5)") {
    const auto params =
        env_moments(EnvironmentFamily::make(FamilyKind::ShiftedPoisson, 0.0, 0.5));
    std::vector<double> values(kCount);
    for (auto& v : values) v = std::log1p(std::exp(0.5 * rng.next_normal()));
    const auto s = testutil::summarize(values);
    CHECK(std::fabs(params.mu - s.mean) <= 3.0 * s.se());
  }
}

TEST_CASE("env_moments is stable under doubling the order") {
  for (FamilyKind kind : {FamilyKind::TwoPoint, FamilyKind::ShiftedPoisson,
                          FamilyKind::ShiftedGeometric}) {
    for (double a : {-3.0, 0.0, 3.0}) {
      for (double b : {0.5, 1.0, 3.0}) {
        const auto family = EnvironmentFamily::make(kind, a, b);
        const auto once = env_moments(family, 64);
        const auto twice = env_moments(family, 2 * once.quad_order);
        INFO(to_string(kind) << " a=" << a << " b=" << b
                             << " order=" << once.quad_order);
        CHECK(std::fabs(once.mu - twice.mu) < 1e-10);
        CHECK(std::fabs(once.sigma - twice.sigma) < 1e-10);
      }
    }
  }
}

TEST_CASE("pair_correlation basics") {
  const auto family = EnvironmentFamily::make(FamilyKind::TwoPoint, 0.0, 1.0);
  CHECK(pair_correlation(family, family, 0.0).rho == 0.0);
  CHECK(pair_correlation(family, family, 1.0).rho == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(pair_correlation(family, family, 1.5), std::domain_error);
  CHECK_THROWS_AS(
      pair_correlation(family, EnvironmentFamily::degenerate(FamilyKind::TwoPoint, 0.0), 0.5),
      DegenerateEnvironmentError);
}

TEST_CASE("pair_correlation sign follows the latent correlation") {
  const auto two_point = EnvironmentFamily::make(FamilyKind::TwoPoint, 0.5, 1.0);
  const auto geometric =
      EnvironmentFamily::make(FamilyKind::ShiftedGeometric, -0.5, 2.0);
  const auto poisson = EnvironmentFamily::make(FamilyKind::ShiftedPoisson, 0.0, 1.0);
  for (double r : {-0.7, -0.1, 0.4, 0.9}) {
    for (const auto* f2 : {&two_point, &geometric, &poisson}) {
      const auto pc = pair_correlation(two_point, *f2, r);
      INFO("latent_r = " << r << ", kind2 = " << to_string(f2->kind()));
      CHECK(std::signbit(pc.rho) == std::signbit(r));
      CHECK(std::fabs(pc.rho) <= 1.0);
    }
  }
}

TEST_CASE("pair_correlation matches a Monte Carlo oracle") {
  const auto family = EnvironmentFamily::make(FamilyKind::TwoPoint, 0.0, 1.0);
  const double latent_r = 0.5;
  const auto pc = pair_correlation(family, family, latent_r);

  constexpr std::size_t kCount = 10'000'000;
  Rng rng(stream_seed(778, 0));
  const double s = std::sqrt(1.0 - latent_r * latent_r);
  double sum1 = 0.0, sum2 = 0.0, sum11 = 0.0, sum22 = 0.0, sum12 = 0.0;
  for (std::size_t i = 0; i < kCount; ++i) {
    const double g1 = rng.next_normal();
    const double g2 = latent_r * g1 + s * rng.next_normal();
    const double m1 = std::log1p(sigmoid(g1));
    const double m2 = std::log1p(sigmoid(g2));
    sum1 += m1;
    sum2 += m2;
    sum11 += m1 * m1;
    sum22 += m2 * m2;
    sum12 += m1 * m2;
  }
  const double inv = 1.0 / static_cast<double>(kCount);
  const double cov = sum12 * inv - sum1 * inv * sum2 * inv;
  const double var1 = sum11 * inv - sum1 * inv * sum1 * inv;
  const double var2 = sum22 * inv - sum2 * inv * sum2 * inv;
  const double mc_rho = cov / std::sqrt(var1 * var2);
  const double se = (1.0 - mc_rho * mc_rho) / std::sqrt(static_cast<double>(kCount));
  CHECK(std::fabs(pc.rho - mc_rho) <= 3.0 * se);
}

TEST_CASE("offspring sums: deterministic edges") {
  Rng rng(51);
  // theta = 1: sigmoid(40) rounds to exactly 1, every individual doubles
  const auto always_split =
      sample_environment(EnvironmentFamily::degenerate(FamilyKind::TwoPoint, 40.0), 0.0);
  CHECK(always_split.param == 1.0);
  for (int i = 0; i < 10; ++i) CHECK(sample_offspring_sum(always_split, 7, rng) == 14);

  // exp(-746) underflows, so the splitting probability is exactly zero
  const auto never_split =
      sample_environment(EnvironmentFamily::degenerate(FamilyKind::TwoPoint, -746.0), 0.0);
  CHECK(never_split.param == 0.0);
  for (int i = 0; i < 10; ++i) CHECK(sample_offspring_sum(never_split, 7, rng) == 7);

  CHECK_THROWS_AS(sample_offspring_sum(always_split, 0, rng), std::domain_error);
}

TEST_CASE("offspring sums never fall below k") {
  Rng rng(52);
  for (FamilyKind kind : {FamilyKind::TwoPoint, FamilyKind::ShiftedPoisson,
                          FamilyKind::ShiftedGeometric}) {
    const auto family = EnvironmentFamily::make(kind, 0.0, 1.5);
    for (int i = 0; i < 3000; ++i) {
      const auto real = sample_environment(family, rng.next_normal());
      const std::uint64_t k = 1 + (rng.next_u64() % 1000);
      CHECK(sample_offspring_sum(real, k, rng) >= k);
    }
  }
}

TEST_CASE("law of large numbers at k = 1e6") {
  Rng rng(53);
  const auto real = sample_environment(
      EnvironmentFamily::make(FamilyKind::TwoPoint, 0.0, 1.0), 0.0);
  REQUIRE(real.param == doctest::Approx(0.5));
  constexpr std::size_t kDraws = 10'000;
  constexpr std::uint64_t k = 1'000'000;
  std::vector<double> ratios(kDraws);
  for (auto& ratio : ratios) {
    ratio = static_cast<double>(sample_offspring_sum(real, k, rng)) /
            static_cast<double>(k);
  }
  const auto s = testutil::summarize(ratios);
  CHECK(std::fabs(s.mean - 1.5) <= 3.0 * s.se());
}

TEST_CASE("offspring sums match the k-fold convolution") {
  constexpr std::size_t kCount = 1'000'000;
  constexpr double kSignificance = 1e-3;
  Rng rng(stream_seed(54, 0));

  for (std::uint64_t k = 1; k <= 5; ++k) {
    SUBCASE(("two-point k=" + std::to_string(k)).c_str()) {
      const auto real = sample_environment(
          EnvironmentFamily::make(FamilyKind::TwoPoint, 0.3, 1.0), 0.7);
      const double theta = real.param;
      std::vector<std::uint64_t> draws(kCount);
      for (auto& d : draws) d = sample_offspring_sum(real, k, rng) - k;
      check_gof(draws,
                [&](std::uint64_t j) {
                  if (j > k) return 0.0;
                  const double dj = static_cast<double>(j);
                  const double dk = static_cast<double>(k);
                  return std::exp(log_binomial_coefficient(dk, dj) +
                                  dj * std::log(theta) +
                                  (dk - dj) * std::log1p(-theta));
                },
                kSignificance);
    }

    SUBCASE(("shifted-poisson k=" + std::to_string(k)).c_str()) {
      const auto real = sample_environment(
          EnvironmentFamily::make(FamilyKind::ShiftedPoisson, 0.0, 1.0), 0.2);
      const double mu = static_cast<double>(k) * real.param;
      std::vector<std::uint64_t> draws(kCount);
      for (auto& d : draws) d = sample_offspring_sum(real, k, rng) - k;
      check_gof(draws,
                [&](std::uint64_t j) {
                  const double dj = static_cast<double>(j);
                  return std::exp(-mu + dj * std::log(mu) - std::lgamma(dj + 1.0));
                },
                kSignificance);
    }

    SUBCASE(("shifted-geometric k=" + std::to_string(k)).c_str()) {
      const auto real = sample_environment(
          EnvironmentFamily::make(FamilyKind::ShiftedGeometric, 0.0, 1.0), -0.4);
      const double q = real.param;
      std::vector<std::uint64_t> draws(kCount);
      for (auto& d : draws) d = sample_offspring_sum(real, k, rng) - k;
      check_gof(draws,
                [&](std::uint64_t j) {
                  const double dj = static_cast<double>(j);
                  const double dk = static_cast<double>(k);
                  return std::exp(log_binomial_coefficient(dj + dk - 1.0, dj) +
                                  dk * std::log(q) + dj * std::log1p(-q));
                },
                kSignificance);
    }
  }
}

TEST_CASE("family kind names round-trip") {
  for (FamilyKind kind : {FamilyKind::TwoPoint, FamilyKind::ShiftedPoisson,
                          FamilyKind::ShiftedGeometric}) {
    CHECK(family_kind_from_string(to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(family_kind_from_string("bogus"), std::invalid_argument);
}
