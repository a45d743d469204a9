#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bprec/simulate.hpp"
#include "bprec/verify.hpp"

namespace bprec {

// CSV emission.  Every file starts with a comment line embedding the
// format version and the configuration digest, then the header row.
// Number formatting is fixed (17 significant digits) so identical runs
// produce identical bytes.

struct SimRow {
  std::uint64_t replication = 0;
  double log_z1 = 0.0;
  double log_z2 = 0.0;
  double r = 0.0;
};

std::string format_double(double x);  // %.17g

void write_simulate_csv(std::ostream& out, const std::vector<SimRow>& rows,
                        std::uint64_t config_digest, int format_version);

// Per-generation dump: replication, process, generation, M, logZ, logW,
// exact_flag.  Requires trajectories simulated with paths retained.
void write_trajectory_csv(std::ostream& out,
                          const std::vector<PairedTrajectory>& pairs,
                          std::uint64_t config_digest, int format_version);

void write_verify_csv(std::ostream& out, const SuiteResult& result,
                      std::uint64_t config_digest, int format_version);

}  // namespace bprec
