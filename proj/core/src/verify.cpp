#include "bprec/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "bprec/environment.hpp"
#include "bprec/errors.hpp"
#include "bprec/normal.hpp"
#include "bprec/statistic.hpp"

namespace bprec {

namespace {

// Antiderivative of Phi: x Phi(x) + phi(x).
double phi_integral(double x) { return x * phi_cdf(x) + phi_pdf(x); }

// Trapezoid of |c - Phi(x)| over [a, b] with a midpoint knot.
double segment_gap_integral(double a, double b, double c) {
  if (!(b > a)) return 0.0;
  const double mid = 0.5 * (a + b);
  const double ga = std::fabs(c - phi_cdf(a));
  const double gm = std::fabs(c - phi_cdf(mid));
  const double gb = std::fabs(c - phi_cdf(b));
  return 0.5 * ((ga + gm) * (mid - a) + (gm + gb) * (b - mid));
}

struct QuadTruth {
  CriticalityParams p1;
  CriticalityParams p2;
  double rho;
};

QuadTruth quadrature_truth(const SimConfig& cfg) {
  QuadTruth truth;
  truth.p1 = env_moments(cfg.family1);
  truth.p2 = env_moments(cfg.family2);
  truth.rho = pair_correlation(cfg.family1, cfg.family2, cfg.latent_r).rho;
  return truth;
}

}  // namespace

SampleSet SampleSet::from_values(std::vector<double> values, std::uint64_t n,
                                 std::uint64_t m, std::uint64_t cfg_digest) {
  if (values.size() < 100) {
    std::ostringstream os;
    os << "SampleSet requires at least 100 samples, got " << values.size();
    throw InsufficientSampleError(os.str());
  }
  std::sort(values.begin(), values.end());
  SampleSet set;
  set.values = std::move(values);
  set.n = n;
  set.m = m;
  set.cfg_digest = cfg_digest;
  return set;
}

double SampleSet::ecdf(double x) const {
  const auto it = std::upper_bound(values.begin(), values.end(), x);
  return static_cast<double>(it - values.begin()) /
         static_cast<double>(values.size());
}

std::uint64_t SampleSet::count_at_least(double x) const {
  const auto it = std::lower_bound(values.begin(), values.end(), x);
  return static_cast<std::uint64_t>(values.end() - it);
}

double ks_distance(const SampleSet& samples) {
  const std::size_t count = samples.size();
  const double dn = static_cast<double>(count);
  double d = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double cdf = phi_cdf(samples.values[i]);
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / dn - cdf));
    d = std::max(d, std::fabs(static_cast<double>(i) / dn - cdf));
  }
  return d;
}

std::vector<std::pair<double, double>> nonuniform_profile(
    const SampleSet& samples, double delta_prime) {
  if (!(delta_prime > 0.0 && delta_prime < 1.0)) {
    std::ostringstream os;
    os << "nonuniform_profile requires delta_prime in (0,1), got "
       << delta_prime;
    throw std::domain_error(os.str());
  }
  std::vector<std::pair<double, double>> profile;
  profile.reserve(101);
  for (int i = 0; i <= 100; ++i) {
    const double x = 0.1 * (i - 50);
    const double gap = std::fabs(samples.ecdf(x) - phi_cdf(x));
    const double weight = 1.0 + std::pow(std::fabs(x), 1.0 + delta_prime);
    profile.emplace_back(x, gap * weight);
  }
  return profile;
}

std::vector<TailRatioPoint> tail_ratio_curve(const SampleSet& samples,
                                             const std::vector<double>& x_grid,
                                             std::vector<std::string>* warnings) {
  std::vector<TailRatioPoint> curve;
  const double dn = static_cast<double>(samples.size());
  for (double x : x_grid) {
    if (!(x >= 0.0)) {
      throw std::domain_error("tail_ratio_curve grid must be nonnegative");
    }
    const double upper_tail = 1.0 - phi_cdf(x);
    if (dn * upper_tail < 50.0) {
      if (warnings != nullptr) {
        std::ostringstream os;
        os << "tail grid point x = " << x << " excluded: expected tail count "
           << dn * upper_tail << " < 50";
        warnings->push_back(os.str());
      }
      continue;
    }
    TailRatioPoint point;
    point.x = x;
    point.upper_ratio =
        (static_cast<double>(samples.count_at_least(x)) / dn) / upper_tail;
    point.lower_ratio = samples.ecdf(-x) / phi_cdf(-x);
    curve.push_back(point);
  }
  return curve;
}

double wasserstein1(const SampleSet& samples) {
  const auto& v = samples.values;
  const std::size_t count = v.size();
  const double dn = static_cast<double>(count);
  const double lo = v.front() - 1.0;
  const double hi = v.back() + 1.0;

  double total = phi_integral(lo);  // integral of Phi below lo
  total += segment_gap_integral(lo, v.front(), 0.0);
  for (std::size_t k = 0; k + 1 < count; ++k) {
    total += segment_gap_integral(v[k], v[k + 1],
                                  static_cast<double>(k + 1) / dn);
  }
  total += segment_gap_integral(v.back(), hi, 1.0);
  total += phi_pdf(hi) - hi * (1.0 - phi_cdf(hi));  // 1 - Phi above hi
  return total;
}

double coverage_study(const SimConfig& cfg, double kappa, IntervalMethod which,
                      unsigned threads) {
  cfg.validate();
  const QuadTruth truth = quadrature_truth(cfg);

  if (which == IntervalMethod::SigmaSq) {
    if (!(cfg.family1 == cfg.family2) || cfg.latent_r != 0.0 || cfg.n != cfg.m) {
      throw std::domain_error(
          "coverage_study(SigmaSq) needs independent copies: identical "
          "families, latent_r = 0 and n = m");
    }
    const double target = truth.p1.sigma * truth.p1.sigma;
    const auto covered = replicate_map<char>(
        cfg, threads, /*keep_paths=*/false,
        [&](std::uint64_t, const PairedTrajectory& pair) {
          const Interval ci = ci_sigma_sq(pair.traj1.log_z, pair.traj2.log_z,
                                          cfg.n, kappa, true);
          return static_cast<char>(ci.lo <= target && target <= ci.hi);
        });
    std::uint64_t hits = 0;
    for (char c : covered) hits += c;
    return static_cast<double>(hits) / static_cast<double>(covered.size());
  }

  const double target = truth.p1.mu - truth.p2.mu;
  const auto covered = replicate_map<char>(
      cfg, threads, /*keep_paths=*/false,
      [&](std::uint64_t, const PairedTrajectory& pair) {
        const Interval ci =
            ci_mu_diff(pair.traj1.log_z, cfg.n, pair.traj2.log_z, cfg.m,
                       truth.p1.sigma, truth.p2.sigma, truth.rho, kappa);
        return static_cast<char>(ci.lo <= target && target <= ci.hi);
      });
  std::uint64_t hits = 0;
  for (char c : covered) hits += c;
  return static_cast<double>(hits) / static_cast<double>(covered.size());
}

SampleSet collect_r_samples(const SimConfig& cfg, unsigned threads) {
  cfg.validate();
  const QuadTruth truth = quadrature_truth(cfg);
  auto values = replicate_map<double>(
      cfg, threads, /*keep_paths=*/false,
      [&](std::uint64_t, const PairedTrajectory& pair) {
        return r_statistic(pair.traj1.log_z, cfg.n, pair.traj2.log_z, cfg.m,
                           truth.p1.mu, truth.p2.mu, truth.p1.sigma,
                           truth.p2.sigma, truth.rho)
            .r;
      });
  return SampleSet::from_values(std::move(values), cfg.n, cfg.m,
                                sim_config_digest(cfg));
}

SampleSet collect_single_process_samples(const SimConfig& cfg,
                                         unsigned threads) {
  // Only process 1 matters here; the second leg is reduced to a single
  // generation so its cost disappears.
  SimConfig reduced = cfg;
  reduced.m = 1;
  reduced.validate();
  const CriticalityParams params = env_moments(reduced.family1);
  auto values = replicate_map<double>(
      reduced, threads, /*keep_paths=*/false,
      [&](std::uint64_t, const PairedTrajectory& pair) {
        return single_process_statistic(pair.traj1.log_z, reduced.n, params.mu,
                                        params.sigma);
      });
  return SampleSet::from_values(std::move(values), reduced.n, reduced.m,
                                sim_config_digest(reduced));
}

SampleSet inject_normal_samples(std::uint64_t count, std::uint64_t master_seed) {
  Rng rng(stream_seed(master_seed, 0));
  std::vector<double> values(count);
  for (auto& value : values) value = rng.next_normal();
  return SampleSet::from_values(std::move(values), 0, 0, master_seed);
}

SuiteEnvelopes SuiteEnvelopes::self_test(std::size_t sample_count) {
  const double sqrt_n = std::sqrt(static_cast<double>(sample_count));
  SuiteEnvelopes env;
  env.ks_max = 1.95 / sqrt_n;       // DKW-style band, ~0.999 confidence
  env.nonuniform_max = 20.0 / sqrt_n;  // calibrated at N = 1e6 -> 0.02
  env.w1_max = 10.0 / sqrt_n;          // calibrated at N = 1e6 -> 0.01
  return env;
}

SuiteResult run_verification(const SimConfig& cfg, const VerifyOptions& options) {
  const std::string& suite = options.suite;
  const bool want_clt = suite == "clt" || suite == "all";
  const bool want_be = suite == "berry-esseen" || suite == "all";
  const bool want_tails = suite == "tails" || suite == "all";
  const bool want_coverage = suite == "coverage" || suite == "all";
  if (!want_clt && !want_be && !want_tails && !want_coverage) {
    throw std::invalid_argument(
        "unknown suite '" + suite +
        "' (expected clt, berry-esseen, tails, coverage or all)");
  }

  SuiteResult result;
  result.suite = suite;
  result.report.delta_prime = options.delta_prime;

  const SuiteEnvelopes env = options.inject_normal
                                 ? SuiteEnvelopes::self_test(cfg.replications)
                                 : options.envelopes;

  auto add_row = [&result](const std::string& name, double x, double value,
                           double lo, double hi) {
    const bool pass = value >= lo && value <= hi;
    result.rows.push_back(DiagnosticRow{name, x, value, lo, hi, pass});
    result.pass = result.pass && pass;
  };

  if (want_clt || want_be || want_tails) {
    const SampleSet samples =
        options.inject_normal
            ? inject_normal_samples(cfg.replications, cfg.master_seed)
            : collect_r_samples(cfg, options.threads);
    result.sample_count = samples.size();
    result.cfg_digest = samples.cfg_digest;

    if (want_clt) {
      result.report.ks = ks_distance(samples);
      add_row("ks", 0.0, result.report.ks, 0.0, env.ks_max);
    }
    if (want_be) {
      result.report.nonuniform_profile =
          nonuniform_profile(samples, options.delta_prime);
      double max_gap = 0.0;
      for (const auto& [x, gap] : result.report.nonuniform_profile) {
        add_row("nonuniform", x, gap, 0.0, env.nonuniform_max);
        max_gap = std::max(max_gap, gap);
      }
      result.report.nonuniform_max = max_gap;
      result.report.w1 = wasserstein1(samples);
      add_row("w1", 0.0, result.report.w1, 0.0, env.w1_max);
    }
    if (want_tails) {
      std::vector<double> grid;
      for (double x = 0.0; x <= options.tail_x_max + 1e-12;
           x += options.tail_x_step) {
        grid.push_back(x);
      }
      result.report.tail_ratios =
          tail_ratio_curve(samples, grid, &result.warnings);
      for (const auto& point : result.report.tail_ratios) {
        double lo = env.tail_lo;
        double hi = env.tail_hi;
        if (options.inject_normal) {
          // Binomial 3-SE band around 1 for the self-test.
          const double p = 1.0 - phi_cdf(point.x);
          const double se = std::sqrt((1.0 - p) /
                                      (p * static_cast<double>(samples.size())));
          lo = 1.0 - 3.0 * se;
          hi = 1.0 + 3.0 * se;
        }
        add_row("tail-upper", point.x, point.upper_ratio, lo, hi);
        add_row("tail-lower", point.x, point.lower_ratio, lo, hi);
      }
    }
  }

  if (want_coverage) {
    if (options.inject_normal) {
      result.warnings.push_back(
          "coverage suite skipped: injection mode has no trajectories");
    } else {
      SimConfig coverage_cfg = cfg;
      coverage_cfg.replications = options.coverage_replications;
      const double coverage =
          coverage_study(coverage_cfg, options.kappa, options.coverage_kind,
                         options.threads);
      result.report.coverage = coverage;
      add_row("coverage", 0.0, coverage, env.coverage_lo, env.coverage_hi);
      if (result.cfg_digest == 0) result.cfg_digest = sim_config_digest(cfg);
    }
  }

  return result;
}

}  // namespace bprec
