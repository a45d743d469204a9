#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bprec/inference.hpp"
#include "bprec/simulate.hpp"

namespace bprec {

// Monte Carlo distributional diagnostics: how close is the empirical
// law of the comparison statistic to the standard normal, uniformly,
// with polynomial tail weights, in the tails themselves, in
// Wasserstein-1 distance, and through confidence-interval coverage.

// A sorted sample of realized statistics.
struct SampleSet {
  std::vector<double> values;  // ascending
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  std::uint64_t cfg_digest = 0;

  // Sorts and validates (at least 100 samples).
  static SampleSet from_values(std::vector<double> values, std::uint64_t n,
                               std::uint64_t m, std::uint64_t cfg_digest);

  std::size_t size() const { return values.size(); }
  // Empirical CDF P(X <= x).
  double ecdf(double x) const;
  // Upper tail count #{values >= x}.
  std::uint64_t count_at_least(double x) const;
};

struct TailRatioPoint {
  double x = 0.0;
  double upper_ratio = 0.0;  // P(R >= x) / (1 - Phi(x))
  double lower_ratio = 0.0;  // P(R <= -x) / Phi(-x)
};

struct VerificationReport {
  double ks = 0.0;
  std::vector<std::pair<double, double>> nonuniform_profile;
  double nonuniform_max = 0.0;
  std::vector<TailRatioPoint> tail_ratios;
  double w1 = 0.0;
  std::optional<double> coverage;
  double delta_prime = 0.0;
};

// Kolmogorov-Smirnov distance of the sample to the standard normal:
//   D = max_i max(|i/N - Phi(x_i)|, |(i-1)/N - Phi(x_i)|).
double ks_distance(const SampleSet& samples);

// Weighted CDF gap |F(x) - Phi(x)| (1 + |x|^{1+delta_prime}) on the
// grid x = -5(0.1)5.  The profile maximum is the non-uniform statistic.
// delta_prime must lie in (0, 1).
std::vector<std::pair<double, double>> nonuniform_profile(
    const SampleSet& samples, double delta_prime);

// Tail ratios on the requested grid of nonnegative x.  Points whose
// expected tail count N (1 - Phi(x)) falls below 50 are excluded and
// reported in *warnings (the ratio estimate would be too noisy).
std::vector<TailRatioPoint> tail_ratio_curve(
    const SampleSet& samples, const std::vector<double>& x_grid,
    std::vector<std::string>* warnings = nullptr);

// Wasserstein-1 distance between the empirical CDF and Phi: trapezoid
// integration of |F - Phi| on the knots (samples plus midpoints) over
// [min - 1, max + 1], plus the analytic Gaussian tail integrals.
double wasserstein1(const SampleSet& samples);

// Fraction of replications whose interval covers the quadrature truth.
// MuDiff covers mu1 - mu2; SigmaSq requires identical families with
// latent_r = 0 and n = m, and covers sigma1^2.
double coverage_study(const SimConfig& cfg, double kappa,
                      IntervalMethod which, unsigned threads = 0);

// --- Suite runner ------------------------------------------------------

// Simulates cfg.replications paired trajectories and collects the
// realized comparison statistics (parameters from quadrature).
SampleSet collect_r_samples(const SimConfig& cfg, unsigned threads = 0);

// Same collection for the single-process statistic of process 1.
SampleSet collect_single_process_samples(const SimConfig& cfg,
                                         unsigned threads = 0);

// Self-test sample: iid standard normals, used to calibrate the
// harness itself.
SampleSet inject_normal_samples(std::uint64_t count, std::uint64_t master_seed);

struct SuiteEnvelopes {
  double ks_max = 0.01;
  double nonuniform_max = 0.05;
  double tail_lo = 0.8;
  double tail_hi = 1.25;
  double w1_max = 0.02;
  double coverage_lo = 0.94;
  double coverage_hi = 0.96;

  // Envelopes for diagnostics run on true standard normal samples,
  // scaled to the sample count (calibrated at N = 1e6).
  static SuiteEnvelopes self_test(std::size_t sample_count);
};

struct VerifyOptions {
  std::string suite = "all";  // clt | berry-esseen | tails | coverage | all
  bool inject_normal = false;
  double delta_prime = 0.5;
  double kappa = 0.05;
  double tail_x_max = 2.0;
  double tail_x_step = 0.25;
  IntervalMethod coverage_kind = IntervalMethod::MuDiff;
  // The coverage sub-run simulates its own, usually smaller, batch so
  // that a distributional suite with millions of samples stays within
  // its runtime budget.
  std::uint64_t coverage_replications = 10'000;
  unsigned threads = 0;
  SuiteEnvelopes envelopes;
};

struct DiagnosticRow {
  std::string diagnostic;
  double x = 0.0;  // grid point; 0 for scalar diagnostics
  double value = 0.0;
  double envelope_lo = 0.0;
  double envelope_hi = 0.0;
  bool pass = false;
};

struct SuiteResult {
  std::string suite;
  bool pass = true;
  VerificationReport report;
  std::vector<DiagnosticRow> rows;
  std::vector<std::string> warnings;
  std::uint64_t sample_count = 0;
  std::uint64_t cfg_digest = 0;
};

// Runs the named suite against cfg and compares every diagnostic with
// its envelope.  Injection mode swaps the simulated statistics for true
// normals and the envelopes for their self-test versions.
SuiteResult run_verification(const SimConfig& cfg, const VerifyOptions& options);

}  // namespace bprec
