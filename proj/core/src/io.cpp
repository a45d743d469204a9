#include "bprec/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace bprec {

namespace {

void write_preamble(std::ostream& out, std::uint64_t digest, int version) {
  char line[80];
  std::snprintf(line, sizeof(line),
                "# bprec format_version=%d config_digest=%016llx", version,
                static_cast<unsigned long long>(digest));
  out << line << '\n';
}

void write_trajectory_rows(std::ostream& out, std::uint64_t replication,
                           int process, const Trajectory& traj) {
  if (traj.m_path.size() != traj.generations ||
      traj.log_z_path.size() != traj.generations ||
      traj.log_w_path.size() != traj.generations) {
    throw std::invalid_argument(
        "write_trajectory_csv needs trajectories with retained paths");
  }
  for (std::uint64_t k = 0; k < traj.generations; ++k) {
    out << replication << ',' << process << ',' << (k + 1) << ','
        << format_double(std::log(traj.m_path[k])) << ','
        << format_double(traj.log_z_path[k]) << ','
        << format_double(traj.log_w_path[k]) << ','
        << ((k + 1) <= traj.exact_until ? 1 : 0) << '\n';
  }
}

}  // namespace

std::string format_double(double x) {
  // shortest representation that round-trips: lossless and stable bytes
  char buffer[40];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), x);
  return std::string(buffer, result.ptr);
}

void write_simulate_csv(std::ostream& out, const std::vector<SimRow>& rows,
                        std::uint64_t config_digest, int format_version) {
  write_preamble(out, config_digest, format_version);
  out << "replication,logZ1,logZ2,r\n";
  for (const SimRow& row : rows) {
    out << row.replication << ',' << format_double(row.log_z1) << ','
        << format_double(row.log_z2) << ',' << format_double(row.r) << '\n';
  }
}

void write_trajectory_csv(std::ostream& out,
                          const std::vector<PairedTrajectory>& pairs,
                          std::uint64_t config_digest, int format_version) {
  write_preamble(out, config_digest, format_version);
  out << "replication,process,generation,M,logZ,logW,exact_flag\n";
  for (std::size_t rep = 0; rep < pairs.size(); ++rep) {
    write_trajectory_rows(out, rep, 1, pairs[rep].traj1);
    write_trajectory_rows(out, rep, 2, pairs[rep].traj2);
  }
}

void write_verify_csv(std::ostream& out, const SuiteResult& result,
                      std::uint64_t config_digest, int format_version) {
  write_preamble(out, config_digest, format_version);
  out << "diagnostic,x,value,envelope_lo,envelope_hi,pass\n";
  for (const DiagnosticRow& row : result.rows) {
    out << row.diagnostic << ',' << format_double(row.x) << ','
        << format_double(row.value) << ',' << format_double(row.envelope_lo)
        << ',' << format_double(row.envelope_hi) << ','
        << (row.pass ? 1 : 0) << '\n';
  }
}

}  // namespace bprec
