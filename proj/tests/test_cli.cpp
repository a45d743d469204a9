#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "bprec/environment.hpp"

#ifndef BPREC_CLI_PATH
#error "BPREC_CLI_PATH must point at the bprec binary"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

class TempDir {
public:
  TempDir() {
    dir_ = fs::temp_directory_path() /
           ("bprec_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }
  fs::path path(const std::string& name) const { return dir_ / name; }

private:
  fs::path dir_;
};

TempDir& tmp() {
  static TempDir dir;
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunResult run_cli(const std::string& args) {
  const fs::path out_file = tmp().path("stdout.txt");
  const fs::path err_file = tmp().path("stderr.txt");
  const std::string command = std::string(BPREC_CLI_PATH) + " " + args + " > " +
                              out_file.string() + " 2> " + err_file.string();
  const int status = std::system(command.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_file);
  result.err = slurp(err_file);
  return result;
}

fs::path write_config(const std::string& name, const std::string& content) {
  const fs::path path = tmp().path(name);
  std::ofstream out(path);
  out << content;
  return path;
}

const std::string kSmallPair =
    "family1.kind = two-point\n"
    "family1.a = 0\n"
    "family1.b = 1\n"
    "family2.kind = two-point\n"
    "family2.a = 0.3\n"
    "family2.b = 0.8\n"
    "latent_r = 0.5\n"
    "n = 60\n"
    "m = 60\n"
    "master_seed = 20240808\n"
    "replications = 300\n";

}  // namespace

TEST_CASE("moments reports quadrature values") {
  const auto cfg = write_config("moments.cfg", kSmallPair);
  const RunResult result = run_cli("moments " + cfg.string());
  REQUIRE(result.exit_code == 0);
  const json out = json::parse(result.out);
  const auto params = bprec::env_moments(
      bprec::EnvironmentFamily::make(bprec::FamilyKind::TwoPoint, 0.0, 1.0));
  CHECK(out["family1"]["mu"].get<double>() ==
        doctest::Approx(params.mu).epsilon(1e-12));
  CHECK(out["family1"]["sigma"].get<double>() ==
        doctest::Approx(params.sigma).epsilon(1e-12));
  CHECK(out["rho"].get<double>() > 0.0);
  CHECK(out["format_version"] == 1);
  CHECK(out.contains("config_digest"));
}

TEST_CASE("malformed config names the bad key and exits nonzero") {
  const auto cfg = write_config("bad.cfg", "not_a_real_key = 12\n");
  const RunResult result = run_cli("moments " + cfg.string());
  CHECK(result.exit_code == 1);
  CHECK(result.err.find("not_a_real_key") != std::string::npos);
}

TEST_CASE("simulate output is byte-identical across runs and worker counts") {
  const auto cfg = write_config("sim.cfg", kSmallPair);
  const auto csv1 = tmp().path("run1.csv");
  const auto csv2 = tmp().path("run2.csv");
  const auto csv8 = tmp().path("run8.csv");
  CHECK(run_cli("simulate " + cfg.string() + " --out " + csv1.string() +
                " --threads 1")
            .exit_code == 0);
  CHECK(run_cli("simulate " + cfg.string() + " --out " + csv2.string() +
                " --threads 1")
            .exit_code == 0);
  CHECK(run_cli("simulate " + cfg.string() + " --out " + csv8.string() +
                " --threads 8")
            .exit_code == 0);
  const std::string first = slurp(csv1);
  CHECK(first == slurp(csv2));
  CHECK(first == slurp(csv8));

  // documented schema
  std::istringstream in(first);
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# bprec format_version=1 config_digest=", 0) == 0);
  std::getline(in, line);
  CHECK(line == "replication,logZ1,logZ2,r");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 300);
}

TEST_CASE("simulate can dump per-generation trajectories") {
  const auto cfg = write_config(
      "dump.cfg",
      "n = 5\nm = 4\nreplications = 3\nmaster_seed = 7\n");
  const auto csv = tmp().path("sim_main.csv");
  const auto dump = tmp().path("traj.csv");
  const RunResult result =
      run_cli("simulate " + cfg.string() + " --out " + csv.string() +
              " --dump-trajectories " + dump.string());
  REQUIRE(result.exit_code == 0);
  std::istringstream in(slurp(dump));
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  CHECK(line == "replication,process,generation,M,logZ,logW,exact_flag");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3 * (5 + 4));
}

TEST_CASE("ci reproduces the worked mu-diff example") {
  const RunResult result = run_cli(
      "ci --logz1 105 --n 100 --logz2 98 --m 100 --sigma1 1 --sigma2 1 "
      "--rho 0 --kappa 0.05");
  REQUIRE(result.exit_code == 0);
  const json out = json::parse(result.out);
  CHECK(out["lo"].get<double>() == doctest::Approx(-0.20718).epsilon(1e-4));
  CHECK(out["hi"].get<double>() == doctest::Approx(0.34718).epsilon(1e-4));
  CHECK(out["method"] == "mu-diff");
  CHECK(out["level"].get<double>() == doctest::Approx(0.95));

  // smaller kappa widens the interval
  const json wider = json::parse(
      run_cli("ci --logz1 105 --n 100 --logz2 98 --m 100 --sigma1 1 "
              "--sigma2 1 --rho 0 --kappa 0.01")
          .out);
  CHECK(wider["hi"].get<double>() - wider["lo"].get<double>() >
        out["hi"].get<double>() - out["lo"].get<double>());
}

TEST_CASE("ci sigma-sq demands the attestation flag") {
  const RunResult refused =
      run_cli("ci --method sigma-sq --logz1 52 --logz2 50 --n 100 --kappa 0.05");
  CHECK(refused.exit_code == 1);
  CHECK(refused.err.find("independent") != std::string::npos);

  const RunResult accepted = run_cli(
      "ci --method sigma-sq --logz1 52 --logz2 50 --n 100 --kappa 0.05 "
      "--independent-copies");
  REQUIRE(accepted.exit_code == 0);
  const json out = json::parse(accepted.out);
  CHECK(out["lo"].get<double>() == doctest::Approx(0.003981).epsilon(1e-3));
  CHECK(out["hi"].get<double>() == doctest::Approx(20.37).epsilon(1e-3));
}

TEST_CASE("ci --from-sim wires quadrature parameters in") {
  const auto cfg = write_config("fromsim.cfg", kSmallPair);
  const RunResult result = run_cli("ci " + cfg.string() + " --from-sim");
  REQUIRE(result.exit_code == 0);
  const json out = json::parse(result.out);
  CHECK(out["lo"].get<double>() < out["hi"].get<double>());
  CHECK(out["inputs"]["sigma1"].get<double>() > 0.0);
}

TEST_CASE("test subcommand evaluates the null hypothesis") {
  const RunResult result = run_cli(
      "test --logz1 50 --n 100 --logz2 25 --m 50 --sigma1 1 --sigma2 1 "
      "--rho 0 --level 0.05");
  REQUIRE(result.exit_code == 0);
  const json out = json::parse(result.out);
  CHECK(out["statistic"].get<double>() == 0.0);
  CHECK(out["p_value"].get<double>() == 1.0);
  CHECK_FALSE(out["decision"].get<bool>());
}

TEST_CASE("verify self-test passes and writes reports") {
  const auto cfg = write_config("inject.cfg",
                                "inject_normal = true\n"
                                "replications = 20000\n"
                                "suite = clt\n"
                                "master_seed = 5\n");
  const auto csv = tmp().path("verify.csv");
  const auto summary = tmp().path("verify.json");
  const RunResult result =
      run_cli("verify " + cfg.string() + " --out-csv " + csv.string() +
              " --out-json " + summary.string());
  CHECK(result.exit_code == 0);
  const json out = json::parse(slurp(summary));
  CHECK(out["pass"].get<bool>());
  CHECK(out["suite"] == "clt");
  const std::string rows = slurp(csv);
  CHECK(rows.find("diagnostic,x,value,envelope_lo,envelope_hi,pass") !=
        std::string::npos);
  CHECK(rows.find("ks,") != std::string::npos);
}

TEST_CASE("verify coverage suite reports the covering fraction") {
  // small-scale smoke: at n = 200 the true coverage sits near 0.93, so
  // the run uses widened envelopes rather than the desk-scale defaults
  const auto cfg = write_config("coverage.cfg",
                                "n = 200\nm = 200\nreplications = 100\n"
                                "coverage_replications = 2000\n"
                                "suite = coverage\nmaster_seed = 9\n"
                                "envelope.coverage_lo = 0.85\n"
                                "envelope.coverage_hi = 0.99\n");
  const RunResult result = run_cli("verify " + cfg.string());
  REQUIRE(result.exit_code == 0);
  const json out = json::parse(result.out);
  const double coverage = out["diagnostics"]["coverage"].get<double>();
  CHECK(coverage > 0.85);
  CHECK(coverage < 0.99);
}

TEST_CASE("verify exits 2 when an envelope fails") {
  // three generations are nowhere near normal at the default envelope
  const auto cfg = write_config("tiny.cfg",
                                "n = 3\nm = 3\nreplications = 20000\n"
                                "suite = clt\nmaster_seed = 6\n");
  const RunResult result = run_cli("verify " + cfg.string());
  CHECK(result.exit_code == 2);
  CHECK(result.err.find("out of envelope") != std::string::npos);
}
