#pragma once

#include <cstdint>
#include <vector>

#include "bprec/environment.hpp"
#include "bprec/parallel.hpp"
#include "bprec/rng.hpp"

namespace bprec {

// Exact-in-distribution simulation of population trajectories.
//
// The population starts at Z_0 = 1 and evolves by
//     Z_{k+1} = sum of Z_k iid offspring draws under generation k's
//               realized environment,
// tracked as an exact integer while Z_k <= pop_cap.  Once the
// population crosses pop_cap, per-generation fluctuations of the
// normalized martingale W_k = Z_k / Pi_k are O(pop_cap^{-1/2}), so the
// simulation freezes ln W at its current value and continues
// deterministically with ln Z_k = ln W_frozen + ln Pi_k.  The exact
// integer mode (a huge pop_cap) serves as the oracle for that scheme.

struct Trajectory {
  std::uint64_t generations = 0;  // n
  double log_z = 0.0;             // ln Z_n
  double log_pi = 0.0;            // ln Pi_n, the sum of the M values
  double log_w = 0.0;             // ln W_n = log_z - log_pi, exactly
  std::uint64_t exact_until = 0;  // last generation tracked exactly
  std::uint64_t z_exact = 1;      // population at exact_until

  // Per-generation records, kept only when requested: conditional
  // means m_k and the running ln Z_k, ln W_k (k = 1..n).
  std::vector<double> m_path;
  std::vector<double> log_z_path;
  std::vector<double> log_w_path;

  double log_m_sum() const { return log_pi; }
};

struct PairedTrajectory {
  Trajectory traj1;
  Trajectory traj2;
  double latent_r = 0.0;
  std::uint64_t seed = 0;  // replication stream seed
};

struct SimConfig {
  EnvironmentFamily family1;
  EnvironmentFamily family2;
  double latent_r = 0.0;
  std::uint64_t n = 1;
  std::uint64_t m = 1;
  std::uint64_t pop_cap = 1'000'000'000;  // exact up to a billion individuals
  std::uint64_t master_seed = 0;
  std::uint64_t replications = 1;

  // Throws on out-of-range fields (n, m >= 1; pop_cap in [1e4, 1e15];
  // |latent_r| <= 1; replications >= 1).
  void validate() const;
};

// Stable digest of a simulation configuration, embedded in output files.
std::uint64_t sim_config_digest(const SimConfig& cfg);

// Simulates one trajectory, drawing the latent environment variable and
// the offspring sums from the same caller-owned stream, interleaved one
// generation at a time.
Trajectory simulate_trajectory(const EnvironmentFamily& family,
                               std::uint64_t generations, std::uint64_t pop_cap,
                               Rng& rng, bool keep_paths = true);

// Simulates the coupled pair for one replication.  A deterministic
// function of (cfg.master_seed, replication_index): the replication
// seed is stream_seed(master_seed, replication), from which three
// sub-streams are derived (latent environments, offspring of process 1,
// offspring of process 2).  Generations k < min(n, m) share one latent
// Gaussian pair with correlation latent_r; later generations use
// independent latents; offspring draws are always independent across
// the two processes given the environments.
PairedTrajectory simulate_pair(const SimConfig& cfg, std::uint64_t replication,
                               bool keep_paths = true);

// Runs all replications of cfg and maps each paired trajectory through
// fn, writing fn's result into the slot of its replication index.  The
// output is invariant under the worker count.
template <typename T, typename Fn>
std::vector<T> replicate_map(const SimConfig& cfg, unsigned threads, bool keep_paths,
                             Fn&& fn) {
  cfg.validate();
  std::vector<T> out(cfg.replications);
  parallel_for_indexed(cfg.replications, threads, [&](std::uint64_t rep) {
    out[rep] = fn(rep, simulate_pair(cfg, rep, keep_paths));
  });
  return out;
}

// Convenience collector of whole trajectory pairs (memory permitting).
std::vector<PairedTrajectory> replicate(const SimConfig& cfg,
                                        unsigned threads = 0,
                                        bool keep_paths = true);

}  // namespace bprec
