#ifndef IKHAM_CONFIG_HPP
#define IKHAM_CONFIG_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ikham/consistency.hpp"
#include "ikham/field.hpp"
#include "ikham/geometry.hpp"
#include "ikham/time_stepper.hpp"

namespace ikham {

class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class RunMode { simulate, consistency, gradcheck, selftest };

inline std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::simulate: return "simulate";
    case RunMode::consistency: return "consistency";
    case RunMode::gradcheck: return "gradcheck";
    case RunMode::selftest: return "selftest";
  }
  return "?";
}

inline RunMode parse_mode(const std::string& s) {
  if (s == "simulate") return RunMode::simulate;
  if (s == "consistency") return RunMode::consistency;
  if (s == "gradcheck") return RunMode::gradcheck;
  if (s == "selftest") return RunMode::selftest;
  throw ConfigError("unknown mode '" + s + "'");
}

/// Key documentation shown by --help; also the whitelist of accepted keys.
struct KeySpec {
  const char* key;
  const char* default_value;
  const char* help;
};

// clang-format off
inline const std::vector<KeySpec>& config_keys() {
  static const std::vector<KeySpec> keys = {
      {"mode", "selftest", "simulate | consistency | gradcheck | selftest (the subcommand wins)"},
      {"grid.L", "6.283185307179586", "periodic cell length"},
      {"grid.M", "64", "number of grid points (even, >= 4)"},
      {"spec.case", "H1", "H1 (p_i = 2i, flat bottom) or H2 (p_i = i)"},
      {"spec.N", "1", "expansion order N"},
      {"physics.delta", "0.3", "shallowness parameter in (0, 1]"},
      {"physics.g", "1", "gravity coefficient"},
      {"physics.c0", "0.001", "minimum admissible depth 1 + eta - b"},
      {"eta.profile", "cos", "zero | cos | fourier | samples | standard"},
      {"eta.amplitude", "0.01", "amplitude for the cos profile"},
      {"eta.wavenumber", "1", "integer number of waves per cell (cos profile)"},
      {"eta.phase", "0", "phase (cos profile)"},
      {"eta.coefficients", "", "fourier profile: 'a m phase; a m phase; ...'"},
      {"eta.samples", "", "samples profile: M comma-separated values"},
      {"phi.profile", "zero", "as eta.profile"},
      {"phi.amplitude", "0", ""},
      {"phi.wavenumber", "1", ""},
      {"phi.phase", "0", ""},
      {"phi.coefficients", "", ""},
      {"phi.samples", "", ""},
      {"bottom.profile", "zero", "as eta.profile"},
      {"bottom.amplitude", "0", ""},
      {"bottom.wavenumber", "1", ""},
      {"bottom.phase", "0", ""},
      {"bottom.coefficients", "", ""},
      {"bottom.samples", "", ""},
      {"stepping.dt", "0.01", "RK4 time step"},
      {"stepping.steps", "100", "number of steps"},
      {"stepping.record_every", "10", "diagnostic cadence in steps"},
      {"stepping.instability_threshold", "0.5", "relative energy drift treated as blow-up"},
      {"solver.tol", "1e-10", "relative residual tolerance of the S(eta) solve"},
      {"solver.max_iter", "500", "GMRES iteration cap"},
      {"solver.restart", "60", "GMRES restart length"},
      {"sweep.delta_min", "0.05", "smallest delta of the geometric sweep"},
      {"sweep.delta_max", "0.4", "largest delta of the geometric sweep"},
      {"sweep.delta_count", "8", "number of deltas in the sweep"},
      {"sweep.delta_list", "", "explicit comma-separated deltas (overrides the geometric grid)"},
      {"sweep.Mz", "16", "initial vertical resolution of the reference solver"},
      {"sweep.Mz_step", "8", "vertical refinement increment"},
      {"sweep.Mz_max", "48", "maximum vertical resolution"},
      {"sweep.fit_exclude_largest", "1", "number of largest deltas excluded from the fit"},
      {"sweep.ref_fraction", "0.01", "reference refinement bound must be below this fraction of |diff|"},
      {"sweep.tol", "1e-13", "S(eta) tolerance used inside the sweep"},
      {"sweep.slope_min", "", "optional lower bound on the fitted slope (check)"},
      {"sweep.slope_max", "", "optional upper bound on the fitted slope (check)"},
      {"gradcheck.eps_list", "0.01,0.005,0.0025", "decreasing finite-difference steps"},
      {"gradcheck.order_min", "1.8", "accepted lower bound on the observed eta order"},
      {"gradcheck.order_max", "2.2", "accepted upper bound on the observed eta order"},
      {"gradcheck.phi_tol", "1e-8", "accepted relative phi discrepancy"},
      {"gradcheck.tol", "1e-12", "S(eta) tolerance used inside gradcheck"},
      {"dir_eta.profile", "cos", "eta direction profile (as eta.profile)"},
      {"dir_eta.amplitude", "1", ""},
      {"dir_eta.wavenumber", "2", ""},
      {"dir_eta.phase", "0.4", ""},
      {"dir_eta.coefficients", "", ""},
      {"dir_eta.samples", "", ""},
      {"dir_phi.profile", "cos", "phi direction profile (as eta.profile)"},
      {"dir_phi.amplitude", "1", ""},
      {"dir_phi.wavenumber", "3", ""},
      {"dir_phi.phase", "0.1", ""},
      {"dir_phi.coefficients", "", ""},
      {"dir_phi.samples", "", ""},
      {"output.dir", "out", "output directory"},
      {"jobs", "1", "worker threads for the consistency sweep"},
  };
  return keys;
}
// clang-format on

/// Flat key = value store. '#' starts a comment; blank lines are ignored.
class KeyValues {
 public:
  KeyValues() {
    for (const auto& k : config_keys()) values_[k.key] = k.default_value;
  }

  static KeyValues from_text(const std::string& text, const std::string& origin = "config") {
    KeyValues kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      if (trim(line).empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value', got '" + trim(line) + "'");
      }
      try {
        kv.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
      } catch (const ConfigError& e) {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
    return kv;
  }

  static KeyValues from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str(), path);
  }

  void set(const std::string& key, const std::string& value) {
    if (!values_.count(key)) throw ConfigError("unknown key '" + key + "'");
    values_[key] = value;
  }

  /// Applies a "key=value" override.
  void set_assignment(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not of the form key=value");
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
  }

  const std::string& raw(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown key '" + key + "'");
    return it->second;
  }

  double number(const std::string& key) const {
    const std::string& s = raw(key);
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': expected a number, got '" + s + "'");
    }
  }

  int integer(const std::string& key) const {
    const std::string& s = raw(key);
    try {
      std::size_t pos = 0;
      const long v = std::stol(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return static_cast<int>(v);
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': expected an integer, got '" + s + "'");
    }
  }

  std::vector<double> number_list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(raw(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      try {
        out.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': bad list entry '" + item + "'");
      }
    }
    return out;
  }

  /// Canonical "key=value" lines in key order.
  std::string canonical() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
    return out;
  }

  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

 private:
  std::map<std::string, std::string> values_;
};

/// FNV-1a, printed in hex; used to tag output files with their configuration.
inline std::string config_hash(const std::string& canonical) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

/// A field described by a named profile.
struct ProfileSpec {
  std::string profile = "zero";
  double amplitude = 0.0;
  int wavenumber = 1;
  double phase = 0.0;
  std::string coefficients;
  std::vector<double> samples;
};

/// Fixed multi-mode test data used by the consistency experiment.
inline Field standard_profile(const Grid& grid, const std::string& which) {
  const double k = 2.0 * std::numbers::pi / grid.length();
  if (which == "eta") return Field::sample(grid, [k](double x) { return 0.1 * std::cos(k * x) + 0.05 * std::sin(2 * k * x); });
  if (which == "bottom") return Field::sample(grid, [k](double x) { return 0.1 * std::sin(k * x + 0.3); });
  if (which == "phi") {
    return Field::sample(grid, [k](double x) {
      return 0.1 * (std::cos(k * x) + 0.5 * std::sin(2 * k * x) + 0.2 * std::cos(3 * k * x));
    });
  }
  return Field(grid);
}

inline Field build_profile(const Grid& grid, const ProfileSpec& p, const std::string& which) {
  const double k0 = 2.0 * std::numbers::pi / grid.length();
  if (p.profile == "zero") return Field(grid);
  if (p.profile == "standard") return standard_profile(grid, which);
  if (p.profile == "cos") {
    return Field::sample(grid, [&](double x) { return p.amplitude * std::cos(p.wavenumber * k0 * x + p.phase); });
  }
  if (p.profile == "fourier") {
    Field f(grid);
    std::stringstream ss(p.coefficients);
    std::string term;
    while (std::getline(ss, term, ';')) {
      if (KeyValues::trim(term).empty()) continue;
      std::istringstream ts(term);
      double a = 0, ph = 0;
      int m = 0;
      if (!(ts >> a >> m)) throw ConfigError(which + ".coefficients: bad term '" + term + "'");
      ts >> ph;
      f += Field::sample(grid, [&](double x) { return a * std::cos(m * k0 * x + ph); });
    }
    return f;
  }
  if (p.profile == "samples") {
    if (static_cast<int>(p.samples.size()) != grid.size()) {
      throw ConfigError(which + ".samples: expected " + std::to_string(grid.size()) + " values, got " +
                        std::to_string(p.samples.size()));
    }
    return Field(grid, Eigen::Map<const Eigen::ArrayXd>(p.samples.data(), grid.size()));
  }
  throw ConfigError(which + ".profile: unknown profile '" + p.profile + "'");
}

struct RunConfig {
  RunMode mode = RunMode::selftest;
  double length = 2.0 * std::numbers::pi;
  int points = 64;
  ExpansionCase expansion_case = ExpansionCase::H1;
  int order = 1;
  double delta = 0.3;
  double gravity = 1.0;
  double depth_floor = 1e-3;
  ProfileSpec eta, phi, bottom, dir_eta, dir_phi;
  double dt = 0.01;
  int steps = 100;
  int record_every = 10;
  double instability_threshold = 0.5;
  SolverOptions solver;
  std::vector<double> deltas;
  int mz = 16;
  int mz_step = 8;
  int mz_max = 48;
  int fit_exclude_largest = 1;
  double ref_fraction = 0.01;
  double sweep_tol = 1e-13;
  std::optional<double> slope_min, slope_max;
  std::vector<double> eps_list;
  double order_min = 1.8, order_max = 2.2, phi_tol = 1e-8, gradcheck_tol = 1e-12;
  std::string output_dir = "out";
  int jobs = 1;
  std::string hash;

  Grid grid() const { return Grid(length, points); }
  ExpansionSpec spec() const { return ExpansionSpec(expansion_case, order); }
  Field eta_field() const { return build_profile(grid(), eta, "eta"); }
  Field phi_field() const { return build_profile(grid(), phi, "phi"); }
  Field bottom_field() const { return build_profile(grid(), bottom, "bottom"); }
  Geometry geometry() const {
    return Geometry(eta_field(), bottom_field(), delta, gravity, depth_floor, spec());
  }
};

namespace detail {

inline ProfileSpec read_profile(const KeyValues& kv, const std::string& prefix) {
  ProfileSpec p;
  p.profile = kv.raw(prefix + ".profile");
  p.amplitude = kv.number(prefix + ".amplitude");
  p.wavenumber = kv.integer(prefix + ".wavenumber");
  p.phase = kv.number(prefix + ".phase");
  p.coefficients = kv.raw(prefix + ".coefficients");
  p.samples = kv.number_list(prefix + ".samples");
  return p;
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("validation error: " + what);
}

}  // namespace detail

/// Converts and validates a key-value store. Every downstream invariant that
/// can be checked without solving is checked here.
inline RunConfig parse_config(const KeyValues& kv) {
  using detail::require;
  RunConfig c;
  c.mode = parse_mode(kv.raw("mode"));
  c.length = kv.number("grid.L");
  c.points = kv.integer("grid.M");
  require(c.length > 0.0, "grid.L must be positive");
  require(c.points >= 4 && c.points % 2 == 0, "grid.M must be even and >= 4");
  try {
    c.expansion_case = parse_case(kv.raw("spec.case"));
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("validation error: ") + e.what());
  }
  c.order = kv.integer("spec.N");
  require(c.order >= 0, "spec.N must be non-negative");
  c.delta = kv.number("physics.delta");
  require(c.delta > 0.0 && c.delta <= 1.0, "physics.delta must lie in (0, 1]");
  c.gravity = kv.number("physics.g");
  require(c.gravity > 0.0, "physics.g must be positive");
  c.depth_floor = kv.number("physics.c0");
  require(c.depth_floor > 0.0, "physics.c0 must be positive");

  c.eta = detail::read_profile(kv, "eta");
  c.phi = detail::read_profile(kv, "phi");
  c.bottom = detail::read_profile(kv, "bottom");
  c.dir_eta = detail::read_profile(kv, "dir_eta");
  c.dir_phi = detail::read_profile(kv, "dir_phi");

  c.dt = kv.number("stepping.dt");
  require(c.dt > 0.0, "stepping.dt must be positive");
  c.steps = kv.integer("stepping.steps");
  require(c.steps >= 0, "stepping.steps must be non-negative");
  c.record_every = kv.integer("stepping.record_every");
  require(c.record_every >= 1, "stepping.record_every must be >= 1");
  c.instability_threshold = kv.number("stepping.instability_threshold");
  require(c.instability_threshold > 0.0, "stepping.instability_threshold must be positive");

  c.solver.tol = kv.number("solver.tol");
  c.solver.max_iter = kv.integer("solver.max_iter");
  c.solver.restart = kv.integer("solver.restart");
  require(c.solver.tol > 0.0, "solver.tol must be positive");
  require(c.solver.max_iter >= 1 && c.solver.restart >= 1, "solver.max_iter and solver.restart must be >= 1");

  c.deltas = kv.number_list("sweep.delta_list");
  if (c.deltas.empty()) {
    const int n = kv.integer("sweep.delta_count");
    const double lo = kv.number("sweep.delta_min");
    const double hi = kv.number("sweep.delta_max");
    require(n >= 2 && lo > 0.0 && hi > lo, "sweep delta range must satisfy 0 < delta_min < delta_max, count >= 2");
    c.deltas = geometric_deltas(lo, hi, n);
  }
  for (double d : c.deltas) require(d > 0.0 && d <= 1.0, "sweep deltas must lie in (0, 1]");
  c.mz = kv.integer("sweep.Mz");
  c.mz_step = kv.integer("sweep.Mz_step");
  c.mz_max = kv.integer("sweep.Mz_max");
  require(c.mz >= 8, "sweep.Mz must be >= 8");
  require(c.mz_step >= 1, "sweep.Mz_step must be >= 1");
  require(c.mz_max >= c.mz + c.mz_step, "sweep.Mz_max must allow at least one refinement");
  c.fit_exclude_largest = kv.integer("sweep.fit_exclude_largest");
  require(c.fit_exclude_largest >= 0, "sweep.fit_exclude_largest must be non-negative");
  c.ref_fraction = kv.number("sweep.ref_fraction");
  c.sweep_tol = kv.number("sweep.tol");
  require(c.sweep_tol > 0.0, "sweep.tol must be positive");
  if (!kv.raw("sweep.slope_min").empty()) c.slope_min = kv.number("sweep.slope_min");
  if (!kv.raw("sweep.slope_max").empty()) c.slope_max = kv.number("sweep.slope_max");

  c.eps_list = kv.number_list("gradcheck.eps_list");
  require(!c.eps_list.empty(), "gradcheck.eps_list must not be empty");
  for (std::size_t i = 0; i < c.eps_list.size(); ++i) {
    require(c.eps_list[i] > 0.0, "gradcheck.eps_list entries must be positive");
    require(i == 0 || c.eps_list[i] < c.eps_list[i - 1], "gradcheck.eps_list must be decreasing");
  }
  c.order_min = kv.number("gradcheck.order_min");
  c.order_max = kv.number("gradcheck.order_max");
  c.phi_tol = kv.number("gradcheck.phi_tol");
  c.gradcheck_tol = kv.number("gradcheck.tol");

  c.output_dir = kv.raw("output.dir");
  c.jobs = kv.integer("jobs");
  require(c.jobs >= 1, "jobs must be >= 1");

  // Build the fields once so profile errors and geometric invariants surface at parse time.
  const Grid grid = c.grid();
  const Field bottom = c.bottom_field();
  const Field eta = c.eta_field();
  c.phi_field();
  build_profile(grid, c.dir_eta, "dir_eta");
  build_profile(grid, c.dir_phi, "dir_phi");
  require(!(c.expansion_case == ExpansionCase::H1 && bottom.max_abs() != 0.0), "H1 requires flat bottom");
  const double hmin = (Field::constant(grid, 1.0) + eta - bottom).min();
  require(hmin >= c.depth_floor, "depth 1 + eta - b falls below physics.c0 (min " + std::to_string(hmin) + ")");

  // where results go and how many threads compute them do not change the results
  KeyValues hashed = kv;
  hashed.set("output.dir", "");
  hashed.set("jobs", "");
  c.hash = config_hash(hashed.canonical());
  return c;
}

}  // namespace ikham

#endif  // IKHAM_CONFIG_HPP
