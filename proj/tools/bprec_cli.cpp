// bprec: simulation and inference for comparing the criticality
// parameters of two supercritical branching processes in random
// environments.
//
// Subcommands: moments, simulate, ci, test, verify.
// Exit codes: 0 success, 1 usage/config error, 2 verification failure,
// 3 I/O error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "bprec/config.hpp"
#include "bprec/environment.hpp"
#include "bprec/errors.hpp"
#include "bprec/inference.hpp"
#include "bprec/io.hpp"
#include "bprec/simulate.hpp"
#include "bprec/statistic.hpp"
#include "bprec/verify.hpp"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerifyFailed = 2;
constexpr int kExitIo = 3;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string hex_digest(std::uint64_t digest) {
  char buffer[20];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(digest));
  return buffer;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("write to '" + path + "' failed");
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
  } else {
    write_file(path, content);
  }
}

json interval_json(const bprec::Interval& interval, const json& inputs) {
  return json{{"method", to_string(interval.method)},
              {"lo", interval.lo},
              {"hi", interval.hi},
              {"level", interval.level},
              {"degenerate", interval.degenerate},
              {"inputs", inputs},
              {"warnings", interval.warnings}};
}

struct KnownParams {
  bprec::CriticalityParams p1;
  bprec::CriticalityParams p2;
  double rho = 0.0;
};

KnownParams quadrature_params(const bprec::RunConfig& cfg) {
  KnownParams params;
  params.p1 = bprec::env_moments(cfg.sim.family1, cfg.quad_order);
  params.p2 = bprec::env_moments(cfg.sim.family2, cfg.quad_order);
  params.rho = bprec::pair_correlation(cfg.sim.family1, cfg.sim.family2,
                                       cfg.sim.latent_r, cfg.quad_order)
                   .rho;
  return params;
}

int cmd_moments(const std::string& config_path, const std::string& out_path) {
  const bprec::RunConfig cfg = bprec::parse_run_config_file(config_path);
  const KnownParams params = quadrature_params(cfg);
  const json out{
      {"format_version", cfg.format_version},
      {"config_digest", hex_digest(bprec::run_config_digest(cfg))},
      {"family1",
       {{"kind", to_string(cfg.sim.family1.kind())},
        {"a", cfg.sim.family1.a()},
        {"b", cfg.sim.family1.b()},
        {"mu", params.p1.mu},
        {"sigma", params.p1.sigma},
        {"quad_order", params.p1.quad_order},
        {"quad_error_estimate", params.p1.quad_error_estimate}}},
      {"family2",
       {{"kind", to_string(cfg.sim.family2.kind())},
        {"a", cfg.sim.family2.a()},
        {"b", cfg.sim.family2.b()},
        {"mu", params.p2.mu},
        {"sigma", params.p2.sigma},
        {"quad_order", params.p2.quad_order},
        {"quad_error_estimate", params.p2.quad_error_estimate}}},
      {"latent_r", cfg.sim.latent_r},
      {"rho", params.rho}};
  emit(out_path, out.dump(2) + "\n");
  return kExitOk;
}

int cmd_simulate(const std::string& config_path, const std::string& out_flag,
                 const std::string& dump_path, unsigned threads_flag) {
  bprec::RunConfig cfg = bprec::parse_run_config_file(config_path);
  if (threads_flag > 0) cfg.threads = threads_flag;
  const std::string out_path = out_flag.empty() ? cfg.out_csv : out_flag;
  const KnownParams params = quadrature_params(cfg);
  const std::uint64_t digest = bprec::run_config_digest(cfg);

  const bool keep_paths = !dump_path.empty();
  std::vector<bprec::PairedTrajectory> kept;
  if (keep_paths) kept.resize(cfg.sim.replications);

  const auto rows = bprec::replicate_map<bprec::SimRow>(
      cfg.sim, cfg.threads, keep_paths,
      [&](std::uint64_t rep, const bprec::PairedTrajectory& pair) {
        bprec::SimRow row;
        row.replication = rep;
        row.log_z1 = pair.traj1.log_z;
        row.log_z2 = pair.traj2.log_z;
        row.r = bprec::r_statistic(pair.traj1.log_z, cfg.sim.n,
                                   pair.traj2.log_z, cfg.sim.m, params.p1.mu,
                                   params.p2.mu, params.p1.sigma,
                                   params.p2.sigma, params.rho)
                    .r;
        if (keep_paths) kept[rep] = pair;
        return row;
      });

  std::ostringstream csv;
  bprec::write_simulate_csv(csv, rows, digest, cfg.format_version);
  emit(out_path, csv.str());

  if (keep_paths) {
    std::ostringstream traj_csv;
    bprec::write_trajectory_csv(traj_csv, kept, digest, cfg.format_version);
    write_file(dump_path, traj_csv.str());
  }
  return kExitOk;
}

// Explicit observation flags shared by `ci` and `test`.
struct Observation {
  double log_z1 = -1.0;
  double log_z2 = -1.0;
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double rho = 0.0;
};

Observation observe_from_sim(const bprec::RunConfig& cfg,
                             std::uint64_t replication, const KnownParams& params) {
  const bprec::PairedTrajectory pair =
      bprec::simulate_pair(cfg.sim, replication, /*keep_paths=*/false);
  Observation obs;
  obs.log_z1 = pair.traj1.log_z;
  obs.log_z2 = pair.traj2.log_z;
  obs.n = cfg.sim.n;
  obs.m = cfg.sim.m;
  obs.sigma1 = params.p1.sigma;
  obs.sigma2 = params.p2.sigma;
  obs.rho = params.rho;
  return obs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Two-sample criticality comparison for branching processes in random "
      "environments"};
  app.require_subcommand(1);

  // moments ---------------------------------------------------------------
  std::string moments_config;
  std::string moments_out;
  auto* moments = app.add_subcommand(
      "moments", "Criticality parameters and correlation by quadrature");
  moments->add_option("config", moments_config, "run configuration file")
      ->required();
  moments->add_option("--out", moments_out, "write JSON here instead of stdout");

  // simulate ----------------------------------------------------------------
  std::string sim_config;
  std::string sim_out;
  std::string sim_dump;
  unsigned sim_threads = 0;
  auto* simulate = app.add_subcommand(
      "simulate", "Replicate paired trajectories, emit per-replication CSV");
  simulate->add_option("config", sim_config, "run configuration file")
      ->required();
  simulate->add_option("--out", sim_out, "output CSV path (default stdout)");
  simulate->add_option("--dump-trajectories", sim_dump,
                       "also write a per-generation CSV (small runs only)");
  simulate->add_option("--threads", sim_threads, "worker threads");

  // shared observation flags ------------------------------------------------
  const auto add_observation_flags = [](CLI::App* cmd, Observation& obs) {
    cmd->add_option("--logz1", obs.log_z1, "observed ln Z of process 1");
    cmd->add_option("--logz2", obs.log_z2, "observed ln Z of process 2");
    cmd->add_option("--n", obs.n, "generations of process 1");
    cmd->add_option("--m", obs.m, "generations of process 2");
    cmd->add_option("--sigma1", obs.sigma1, "known sigma of process 1");
    cmd->add_option("--sigma2", obs.sigma2, "known sigma of process 2");
    cmd->add_option("--rho", obs.rho, "known environment correlation");
  };

  // ci ------------------------------------------------------------------
  std::string ci_config;
  std::string ci_method = "mu-diff";
  std::string ci_out;
  bool ci_from_sim = false;
  std::uint64_t ci_replication = 0;
  double ci_kappa = -1.0;
  bool ci_independent = false;
  Observation ci_obs;
  auto* ci = app.add_subcommand("ci", "Confidence interval for mu1 - mu2 or sigma1^2");
  ci->add_option("config", ci_config, "run configuration file");
  ci->add_option("--method", ci_method, "mu-diff or sigma-sq")
      ->check(CLI::IsMember({"mu-diff", "sigma-sq"}));
  ci->add_flag("--from-sim", ci_from_sim,
               "simulate the observation from the config (quadrature truths)");
  ci->add_option("--replication", ci_replication, "replication index for --from-sim");
  ci->add_option("--kappa", ci_kappa, "1 - confidence level");
  ci->add_flag("--independent-copies", ci_independent,
               "attest that process 2 is an independent copy of process 1");
  ci->add_option("--out", ci_out, "write JSON here instead of stdout");
  add_observation_flags(ci, ci_obs);

  // test ------------------------------------------------------------------
  std::string test_config;
  std::string test_out;
  bool test_from_sim = false;
  std::uint64_t test_replication = 0;
  double test_level = -1.0;
  Observation test_obs;
  auto* test = app.add_subcommand("test", "Two-sided test of mu1 = mu2");
  test->add_option("config", test_config, "run configuration file");
  test->add_flag("--from-sim", test_from_sim,
                 "simulate the observation from the config");
  test->add_option("--replication", test_replication,
                   "replication index for --from-sim");
  test->add_option("--level", test_level, "rejection level");
  test->add_option("--out", test_out, "write JSON here instead of stdout");
  add_observation_flags(test, test_obs);

  // verify ------------------------------------------------------------------
  std::string verify_config;
  std::string verify_suite;
  std::string verify_out_csv;
  std::string verify_out_json;
  unsigned verify_threads = 0;
  auto* verify = app.add_subcommand(
      "verify", "Monte Carlo distributional diagnostics against the normal");
  verify->add_option("config", verify_config, "run configuration file")
      ->required();
  verify->add_option("--suite", verify_suite,
                     "clt | berry-esseen | tails | coverage | all");
  verify->add_option("--out-csv", verify_out_csv, "diagnostic rows CSV path");
  verify->add_option("--out-json", verify_out_json, "summary JSON path");
  verify->add_option("--threads", verify_threads, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (moments->parsed()) return cmd_moments(moments_config, moments_out);
    if (simulate->parsed())
      return cmd_simulate(sim_config, sim_out, sim_dump, sim_threads);

    if (ci->parsed()) {
      bprec::RunConfig cfg;
      if (!ci_config.empty()) cfg = bprec::parse_run_config_file(ci_config);
      const double kappa = ci_kappa > 0.0 ? ci_kappa : cfg.kappa;
      Observation obs = ci_obs;
      if (ci_from_sim) {
        if (ci_config.empty())
          throw std::invalid_argument("--from-sim needs a config file");
        const KnownParams params = quadrature_params(cfg);
        obs = observe_from_sim(cfg, ci_replication, params);
        if (ci_method == "sigma-sq") {
          // the independent-copy design can be read off the config
          if (!(cfg.sim.family1 == cfg.sim.family2) || cfg.sim.latent_r != 0.0 ||
              cfg.sim.n != cfg.sim.m) {
            throw std::invalid_argument(
                "sigma-sq from simulation needs identical families, "
                "latent_r = 0 and n = m");
          }
          ci_independent = true;
        }
      }

      json result;
      if (ci_method == "sigma-sq") {
        if (obs.log_z1 < 0.0 || obs.log_z2 < 0.0 || obs.n == 0)
          throw std::invalid_argument(
              "sigma-sq needs --logz1, --logz2 and --n (or --from-sim)");
        const bprec::Interval interval = bprec::ci_sigma_sq(
            obs.log_z1, obs.log_z2, obs.n, kappa, ci_independent);
        result = interval_json(interval, json{{"logz1", obs.log_z1},
                                              {"logz2", obs.log_z2},
                                              {"n", obs.n},
                                              {"kappa", kappa}});
      } else {
        if (obs.log_z1 < 0.0 || obs.log_z2 < 0.0 || obs.n == 0 || obs.m == 0 ||
            obs.sigma1 <= 0.0 || obs.sigma2 <= 0.0)
          throw std::invalid_argument(
              "mu-diff needs --logz1/--logz2/--n/--m/--sigma1/--sigma2/--rho "
              "(or --from-sim)");
        const bprec::Interval interval =
            bprec::ci_mu_diff(obs.log_z1, obs.n, obs.log_z2, obs.m, obs.sigma1,
                              obs.sigma2, obs.rho, kappa);
        result = interval_json(interval, json{{"logz1", obs.log_z1},
                                              {"logz2", obs.log_z2},
                                              {"n", obs.n},
                                              {"m", obs.m},
                                              {"sigma1", obs.sigma1},
                                              {"sigma2", obs.sigma2},
                                              {"rho", obs.rho},
                                              {"kappa", kappa}});
      }
      result["format_version"] = cfg.format_version;
      result["config_digest"] = hex_digest(bprec::run_config_digest(cfg));
      emit(ci_out, result.dump(2) + "\n");
      return kExitOk;
    }

    if (test->parsed()) {
      bprec::RunConfig cfg;
      if (!test_config.empty()) cfg = bprec::parse_run_config_file(test_config);
      const double level = test_level > 0.0 ? test_level : cfg.kappa;
      Observation obs = test_obs;
      if (test_from_sim) {
        if (test_config.empty())
          throw std::invalid_argument("--from-sim needs a config file");
        const KnownParams params = quadrature_params(cfg);
        obs = observe_from_sim(cfg, test_replication, params);
      }
      if (obs.log_z1 < 0.0 || obs.log_z2 < 0.0 || obs.n == 0 || obs.m == 0 ||
          obs.sigma1 <= 0.0 || obs.sigma2 <= 0.0)
        throw std::invalid_argument(
            "test needs --logz1/--logz2/--n/--m/--sigma1/--sigma2/--rho "
            "(or --from-sim)");
      const bprec::TestResult t =
          bprec::test_mu_equal(obs.log_z1, obs.n, obs.log_z2, obs.m, obs.sigma1,
                               obs.sigma2, obs.rho, level);
      const json result{
          {"method", "mu-equal"},
          {"statistic", t.statistic},
          {"p_value", t.p_value},
          {"reject_at", t.reject_at},
          {"decision", t.decision},
          {"inputs",
           {{"logz1", obs.log_z1},
            {"logz2", obs.log_z2},
            {"n", obs.n},
            {"m", obs.m},
            {"sigma1", obs.sigma1},
            {"sigma2", obs.sigma2},
            {"rho", obs.rho}}},
          {"warnings", t.warnings},
          {"format_version", cfg.format_version},
          {"config_digest", hex_digest(bprec::run_config_digest(cfg))}};
      emit(test_out, result.dump(2) + "\n");
      return kExitOk;
    }

    if (verify->parsed()) {
      bprec::RunConfig cfg = bprec::parse_run_config_file(verify_config);
      if (!verify_suite.empty()) cfg.suite = verify_suite;
      if (verify_threads > 0) cfg.threads = verify_threads;
      if (!verify_out_csv.empty()) cfg.out_csv = verify_out_csv;
      if (!verify_out_json.empty()) cfg.out_json = verify_out_json;

      const bprec::SuiteResult result =
          bprec::run_verification(cfg.sim, bprec::verify_options_from(cfg));
      const std::uint64_t digest = bprec::run_config_digest(cfg);

      if (!cfg.out_csv.empty()) {
        std::ostringstream csv;
        bprec::write_verify_csv(csv, result, digest, cfg.format_version);
        write_file(cfg.out_csv, csv.str());
      }

      json summary{{"format_version", cfg.format_version},
                   {"config_digest", hex_digest(digest)},
                   {"suite", result.suite},
                   {"pass", result.pass},
                   {"sample_count", result.sample_count},
                   {"warnings", result.warnings}};
      json diagnostics;
      diagnostics["ks"] = result.report.ks;
      diagnostics["nonuniform_max"] = result.report.nonuniform_max;
      diagnostics["w1"] = result.report.w1;
      diagnostics["delta_prime"] = result.report.delta_prime;
      if (result.report.coverage.has_value())
        diagnostics["coverage"] = *result.report.coverage;
      summary["diagnostics"] = diagnostics;
      if (!cfg.out_json.empty()) write_file(cfg.out_json, summary.dump(2) + "\n");

      int failing = 0;
      for (const auto& row : result.rows) {
        if (!row.pass) ++failing;
      }
      std::cout << summary.dump(2) << '\n';
      if (!result.pass) {
        std::cerr << "verification failed: " << failing
                  << " diagnostic rows out of envelope\n";
        return kExitVerifyFailed;
      }
      return kExitOk;
    }
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
