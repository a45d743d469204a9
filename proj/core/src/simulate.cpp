#include "bprec/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "bprec/digest.hpp"

namespace bprec {

namespace {

constexpr double kMaxExactSumMean = 9e15;

template <typename LatentFn>
Trajectory simulate_core(const EnvironmentFamily& family,
                         std::uint64_t generations, std::uint64_t pop_cap,
                         LatentFn&& latent, Rng& offspring_rng,
                         bool keep_paths) {
  if (generations == 0) {
    throw std::domain_error("simulate_trajectory requires n >= 1");
  }

  Trajectory traj;
  traj.generations = generations;
  if (keep_paths) {
    traj.m_path.reserve(generations);
    traj.log_z_path.reserve(generations);
    traj.log_w_path.reserve(generations);
  }

  std::uint64_t z = 1;
  double log_z = 0.0;
  double log_pi = 0.0;
  double pi_comp = 0.0;  // Kahan carry for the M sum
  double log_w = 0.0;
  double frozen_w = 0.0;
  bool exact = true;

  for (std::uint64_t k = 0; k < generations; ++k) {
    const EnvRealization real = sample_environment(family, latent(k));
    if (keep_paths) traj.m_path.push_back(real.mean);

    if (exact && z <= pop_cap &&
        static_cast<double>(z) * real.mean <= kMaxExactSumMean) {
      z = sample_offspring_sum(real, z, offspring_rng);
      const double y = real.log_mean - pi_comp;
      const double t = log_pi + y;
      pi_comp = (t - log_pi) - y;
      log_pi = t;
      log_z = std::log(static_cast<double>(z));
      log_w = log_z - log_pi;
      traj.exact_until = k + 1;
      traj.z_exact = z;
    } else {
      if (exact) {
        frozen_w = log_z - log_pi;
        exact = false;
      }
      const double y = real.log_mean - pi_comp;
      const double t = log_pi + y;
      pi_comp = (t - log_pi) - y;
      log_pi = t;
      log_z = frozen_w + log_pi;
      log_w = frozen_w;
    }
    if (keep_paths) {
      traj.log_z_path.push_back(log_z);
      traj.log_w_path.push_back(log_w);
    }
  }

  traj.log_z = log_z;
  traj.log_pi = log_pi;
  traj.log_w = log_z - log_pi;
  return traj;
}

}  // namespace

void SimConfig::validate() const {
  if (n < 1 || m < 1) {
    throw std::domain_error("SimConfig: generation counts n, m must be >= 1");
  }
  if (pop_cap < 10'000 || pop_cap > 1'000'000'000'000'000ULL) {
    std::ostringstream os;
    os << "SimConfig: pop_cap must lie in [1e4, 1e15], got " << pop_cap;
    throw std::domain_error(os.str());
  }
  if (!(std::fabs(latent_r) <= 1.0)) {
    std::ostringstream os;
    os << "SimConfig: |latent_r| must be <= 1, got " << latent_r;
    throw std::domain_error(os.str());
  }
  if (replications < 1) {
    throw std::domain_error("SimConfig: replications must be >= 1");
  }
}

std::uint64_t sim_config_digest(const SimConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << to_string(cfg.family1.kind()) << '|' << cfg.family1.a() << '|'
     << cfg.family1.b() << '|' << to_string(cfg.family2.kind()) << '|'
     << cfg.family2.a() << '|' << cfg.family2.b() << '|' << cfg.latent_r << '|'
     << cfg.n << '|' << cfg.m << '|' << cfg.pop_cap << '|' << cfg.master_seed
     << '|' << cfg.replications;
  return fnv1a64(os.str());
}

Trajectory simulate_trajectory(const EnvironmentFamily& family,
                               std::uint64_t generations, std::uint64_t pop_cap,
                               Rng& rng, bool keep_paths) {
  return simulate_core(
      family, generations, pop_cap, [&rng](std::uint64_t) { return rng.next_normal(); },
      rng, keep_paths);
}

PairedTrajectory simulate_pair(const SimConfig& cfg, std::uint64_t replication,
                               bool keep_paths) {
  cfg.validate();
  const std::uint64_t seed = stream_seed(cfg.master_seed, replication);
  Rng env_rng(stream_seed(seed, 0));
  Rng offspring1_rng(stream_seed(seed, 1));
  Rng offspring2_rng(stream_seed(seed, 2));

  // Latent draws first: shared generations get one coupled pair, the
  // tail of the longer process draws independently afterwards.
  const std::uint64_t shared = std::min(cfg.n, cfg.m);
  const double r = cfg.latent_r;
  const double s = std::sqrt(std::max(0.0, 1.0 - r * r));
  std::vector<double> g1(cfg.n);
  std::vector<double> g2(cfg.m);
  for (std::uint64_t k = 0; k < shared; ++k) {
    const double u = env_rng.next_normal();
    const double v = env_rng.next_normal();
    g1[k] = u;
    g2[k] = r * u + s * v;
  }
  for (std::uint64_t k = shared; k < cfg.n; ++k) g1[k] = env_rng.next_normal();
  for (std::uint64_t k = shared; k < cfg.m; ++k) g2[k] = env_rng.next_normal();

  PairedTrajectory pair;
  pair.latent_r = r;
  pair.seed = seed;
  pair.traj1 = simulate_core(
      cfg.family1, cfg.n, cfg.pop_cap, [&g1](std::uint64_t k) { return g1[k]; },
      offspring1_rng, keep_paths);
  pair.traj2 = simulate_core(
      cfg.family2, cfg.m, cfg.pop_cap, [&g2](std::uint64_t k) { return g2[k]; },
      offspring2_rng, keep_paths);
  return pair;
}

std::vector<PairedTrajectory> replicate(const SimConfig& cfg, unsigned threads,
                                        bool keep_paths) {
  return replicate_map<PairedTrajectory>(
      cfg, threads, keep_paths,
      [](std::uint64_t, PairedTrajectory pair) { return pair; });
}

}  // namespace bprec
