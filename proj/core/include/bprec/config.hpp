#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "bprec/simulate.hpp"
#include "bprec/verify.hpp"

namespace bprec {

// Flat plain-text run configuration: one `key = value` per line, `#`
// comments, every key optional with a documented default.  The format
// round-trips losslessly (doubles are printed with 17 significant
// digits).

struct RunConfig {
  int format_version = 1;
  SimConfig sim;
  int quad_order = 64;

  double kappa = 0.05;
  double delta_prime = 0.5;
  std::string suite = "all";
  bool inject_normal = false;
  std::string coverage_kind = "mu-diff";
  std::uint64_t coverage_replications = 10'000;
  double tail_x_max = 2.0;
  double tail_x_step = 0.25;
  unsigned threads = 0;
  std::string out_csv;
  std::string out_json;
  SuiteEnvelopes envelopes;
};

// Throws std::invalid_argument naming the offending key on unknown keys
// or unparsable values.
RunConfig parse_run_config(std::istream& in);
RunConfig parse_run_config_string(const std::string& text);
RunConfig parse_run_config_file(const std::string& path);

// Canonical text form: every key, fixed order.
std::string serialize_run_config(const RunConfig& cfg);

// Digest of the canonical serialization; embedded in every output file.
std::uint64_t run_config_digest(const RunConfig& cfg);

// Maps the verification-related fields onto suite-runner options.
VerifyOptions verify_options_from(const RunConfig& cfg);

}  // namespace bprec
