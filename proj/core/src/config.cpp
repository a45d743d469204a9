#include "bprec/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bprec/digest.hpp"

namespace bprec {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw std::invalid_argument("config key '" + key + "' has invalid value '" +
                              value + "'");
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double parsed = std::stod(value, &pos);
    if (pos != value.size()) bad_value(key, value);
    return parsed;
  } catch (const std::invalid_argument&) {
    bad_value(key, value);
  } catch (const std::out_of_range&) {
    bad_value(key, value);
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const unsigned long long parsed = std::stoull(value, &pos);
    if (pos != value.size()) bad_value(key, value);
    return parsed;
  } catch (const std::invalid_argument&) {
    bad_value(key, value);
  } catch (const std::out_of_range&) {
    bad_value(key, value);
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  bad_value(key, value);
}

std::string format_double_17(double x) {
  char buffer[40];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), x);
  return std::string(buffer, result.ptr);
}

struct FamilyFields {
  FamilyKind kind = FamilyKind::TwoPoint;
  double a = 0.0;
  double b = 1.0;
};

}  // namespace

RunConfig parse_run_config(std::istream& in) {
  RunConfig cfg;
  FamilyFields f1;
  FamilyFields f2;

  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << "config line " << line_number << " is not 'key = value': "
         << stripped;
      throw std::invalid_argument(os.str());
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));

    if (key == "format_version") {
      cfg.format_version = static_cast<int>(parse_u64(key, value));
    } else if (key == "family1.kind") {
      f1.kind = family_kind_from_string(value);
    } else if (key == "family1.a") {
      f1.a = parse_double(key, value);
    } else if (key == "family1.b") {
      f1.b = parse_double(key, value);
    } else if (key == "family2.kind") {
      f2.kind = family_kind_from_string(value);
    } else if (key == "family2.a") {
      f2.a = parse_double(key, value);
    } else if (key == "family2.b") {
      f2.b = parse_double(key, value);
    } else if (key == "latent_r") {
      cfg.sim.latent_r = parse_double(key, value);
    } else if (key == "n") {
      cfg.sim.n = parse_u64(key, value);
    } else if (key == "m") {
      cfg.sim.m = parse_u64(key, value);
    } else if (key == "pop_cap") {
      cfg.sim.pop_cap = parse_u64(key, value);
    } else if (key == "master_seed") {
      cfg.sim.master_seed = parse_u64(key, value);
    } else if (key == "replications") {
      cfg.sim.replications = parse_u64(key, value);
    } else if (key == "quad_order") {
      cfg.quad_order = static_cast<int>(parse_u64(key, value));
    } else if (key == "kappa") {
      cfg.kappa = parse_double(key, value);
    } else if (key == "delta_prime") {
      cfg.delta_prime = parse_double(key, value);
    } else if (key == "suite") {
      cfg.suite = value;
    } else if (key == "inject_normal") {
      cfg.inject_normal = parse_bool(key, value);
    } else if (key == "coverage_kind") {
      if (value != "mu-diff" && value != "sigma-sq") bad_value(key, value);
      cfg.coverage_kind = value;
    } else if (key == "coverage_replications") {
      cfg.coverage_replications = parse_u64(key, value);
    } else if (key == "tail_x_max") {
      cfg.tail_x_max = parse_double(key, value);
    } else if (key == "tail_x_step") {
      cfg.tail_x_step = parse_double(key, value);
    } else if (key == "threads") {
      cfg.threads = static_cast<unsigned>(parse_u64(key, value));
    } else if (key == "out_csv") {
      cfg.out_csv = value;
    } else if (key == "out_json") {
      cfg.out_json = value;
    } else if (key == "envelope.ks_max") {
      cfg.envelopes.ks_max = parse_double(key, value);
    } else if (key == "envelope.nonuniform_max") {
      cfg.envelopes.nonuniform_max = parse_double(key, value);
    } else if (key == "envelope.tail_lo") {
      cfg.envelopes.tail_lo = parse_double(key, value);
    } else if (key == "envelope.tail_hi") {
      cfg.envelopes.tail_hi = parse_double(key, value);
    } else if (key == "envelope.w1_max") {
      cfg.envelopes.w1_max = parse_double(key, value);
    } else if (key == "envelope.coverage_lo") {
      cfg.envelopes.coverage_lo = parse_double(key, value);
    } else if (key == "envelope.coverage_hi") {
      cfg.envelopes.coverage_hi = parse_double(key, value);
    } else {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }

  const auto build_family = [](const FamilyFields& f, const char* which) {
    if (f.b == 0.0) {
      // Degenerate families are constructible but rejected by the moment
      // and correlation routines; allow them so the simulator's
      // deterministic-environment mode stays scriptable.
      return EnvironmentFamily::degenerate(f.kind, f.a);
    }
    try {
      return EnvironmentFamily::make(f.kind, f.a, f.b);
    } catch (const std::exception& e) {
      throw std::invalid_argument(std::string(which) + ": " + e.what());
    }
  };
  cfg.sim.family1 = build_family(f1, "family1");
  cfg.sim.family2 = build_family(f2, "family2");
  return cfg;
}

RunConfig parse_run_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_run_config(in);
}

RunConfig parse_run_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file '" + path + "'");
  }
  return parse_run_config(in);
}

std::string serialize_run_config(const RunConfig& cfg) {
  std::ostringstream os;
  os << "format_version = " << cfg.format_version << '\n'
     << "family1.kind = " << to_string(cfg.sim.family1.kind()) << '\n'
     << "family1.a = " << format_double_17(cfg.sim.family1.a()) << '\n'
     << "family1.b = " << format_double_17(cfg.sim.family1.b()) << '\n'
     << "family2.kind = " << to_string(cfg.sim.family2.kind()) << '\n'
     << "family2.a = " << format_double_17(cfg.sim.family2.a()) << '\n'
     << "family2.b = " << format_double_17(cfg.sim.family2.b()) << '\n'
     << "latent_r = " << format_double_17(cfg.sim.latent_r) << '\n'
     << "n = " << cfg.sim.n << '\n'
     << "m = " << cfg.sim.m << '\n'
     << "pop_cap = " << cfg.sim.pop_cap << '\n'
     << "master_seed = " << cfg.sim.master_seed << '\n'
     << "replications = " << cfg.sim.replications << '\n'
     << "quad_order = " << cfg.quad_order << '\n'
     << "kappa = " << format_double_17(cfg.kappa) << '\n'
     << "delta_prime = " << format_double_17(cfg.delta_prime) << '\n'
     << "suite = " << cfg.suite << '\n'
     << "inject_normal = " << (cfg.inject_normal ? "true" : "false") << '\n'
     << "coverage_kind = " << cfg.coverage_kind << '\n'
     << "coverage_replications = " << cfg.coverage_replications << '\n'
     << "tail_x_max = " << format_double_17(cfg.tail_x_max) << '\n'
     << "tail_x_step = " << format_double_17(cfg.tail_x_step) << '\n'
     << "threads = " << cfg.threads << '\n'
     << "out_csv = " << cfg.out_csv << '\n'
     << "out_json = " << cfg.out_json << '\n'
     << "envelope.ks_max = " << format_double_17(cfg.envelopes.ks_max) << '\n'
     << "envelope.nonuniform_max = "
     << format_double_17(cfg.envelopes.nonuniform_max) << '\n'
     << "envelope.tail_lo = " << format_double_17(cfg.envelopes.tail_lo) << '\n'
     << "envelope.tail_hi = " << format_double_17(cfg.envelopes.tail_hi) << '\n'
     << "envelope.w1_max = " << format_double_17(cfg.envelopes.w1_max) << '\n'
     << "envelope.coverage_lo = "
     << format_double_17(cfg.envelopes.coverage_lo) << '\n'
     << "envelope.coverage_hi = "
     << format_double_17(cfg.envelopes.coverage_hi) << '\n';
  return os.str();
}

std::uint64_t run_config_digest(const RunConfig& cfg) {
  // The digest identifies what the run computes, so execution-only and
  // output-path fields are excluded; the same data config hashed the
  // same way regardless of worker count or file destinations.
  RunConfig canonical = cfg;
  canonical.threads = 0;
  canonical.out_csv.clear();
  canonical.out_json.clear();
  return fnv1a64(serialize_run_config(canonical));
}

VerifyOptions verify_options_from(const RunConfig& cfg) {
  VerifyOptions options;
  options.suite = cfg.suite;
  options.inject_normal = cfg.inject_normal;
  options.delta_prime = cfg.delta_prime;
  options.kappa = cfg.kappa;
  options.tail_x_max = cfg.tail_x_max;
  options.tail_x_step = cfg.tail_x_step;
  options.coverage_kind = cfg.coverage_kind == "sigma-sq"
                              ? IntervalMethod::SigmaSq
                              : IntervalMethod::MuDiff;
  options.coverage_replications = cfg.coverage_replications;
  options.threads = cfg.threads;
  options.envelopes = cfg.envelopes;
  return options;
}

}  // namespace bprec
