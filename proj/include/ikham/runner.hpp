#ifndef IKHAM_RUNNER_HPP
#define IKHAM_RUNNER_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ikham/config.hpp"
#include "ikham/consistency.hpp"
#include "ikham/hamiltonian.hpp"
#include "ikham/selftest.hpp"
#include "ikham/time_stepper.hpp"

namespace ikham {

/// Process exit codes of the command-line driver.
enum ExitCode : int { exit_ok = 0, exit_check_failed = 1, exit_usage = 2, exit_numerical = 3 };

/// CSV writer that stamps the configuration hash and a header row.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& hash, const std::vector<std::string>& columns)
      : out_(path) {
    if (!out_) throw Error("cannot write '" + path.string() + "'");
    out_ << "# config_hash=" << hash << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << "\n";
    out_ << std::setprecision(17);
  }

  template <class... Ts>
  void row(const Ts&... values) {
    std::size_t i = 0;
    ((out_ << (i++ ? "," : "") << values), ...);
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

/// key = value summary file.
class SummaryWriter {
 public:
  SummaryWriter(const std::filesystem::path& path, const std::string& hash) : out_(path) {
    if (!out_) throw Error("cannot write '" + path.string() + "'");
    out_ << "# config_hash=" << hash << "\n" << std::setprecision(17);
  }
  template <class T>
  SummaryWriter& put(const std::string& key, const T& value) {
    out_ << key << " = " << value << "\n";
    return *this;
  }

 private:
  std::ofstream out_;
};

namespace detail {

inline int run_simulate(const RunConfig& cfg, const std::filesystem::path& dir, std::ostream& log) {
  const Geometry geom = cfg.geometry();
  SimulationConfig sim{geom, cfg.spec(), CanonicalState{cfg.eta_field(), cfg.phi_field(), 0.0}, cfg.dt, cfg.steps, cfg.record_every, cfg.solver, cfg.instability_threshold};
  sim.dt = cfg.dt;
  sim.steps = cfg.steps;
  sim.record_every = cfg.record_every;
  sim.solver = cfg.solver;
  sim.instability_threshold = cfg.instability_threshold;
  const Trajectory traj = simulate(sim);

  {
    CsvWriter csv(dir / "trajectory.csv", cfg.hash, {"t", "energy", "constraint_residual", "ik_residual"});
    for (std::size_t n = 0; n < traj.size(); ++n) {
      csv.row(traj.states[n].t, traj.energies[n], traj.constraint_residuals[n], traj.ik_residuals[n]);
    }
  }
  for (std::size_t n = 0; n < traj.size(); ++n) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%04zu.csv", n);
    CsvWriter csv(dir / name, cfg.hash, {"x", "eta", "phi"});
    const auto& s = traj.states[n];
    for (int j = 0; j < s.eta.size(); ++j) csv.row(s.eta.grid().node(j), s.eta[j], s.phi[j]);
  }
  SummaryWriter summary(dir / "summary.txt", cfg.hash);
  summary.put("mode", "simulate").put("status", to_string(traj.status)).put("records", traj.size());
  if (!traj.energies.empty()) {
    const double e0 = traj.energies.front();
    summary.put("energy_initial", e0).put("energy_final", traj.energies.back());
    summary.put("relative_energy_drift", e0 != 0.0 ? std::abs(traj.energies.back() - e0) / std::abs(e0) : 0.0);
  }
  if (!traj.ok()) {
    summary.put("error", traj.message);
    log << "error: " << traj.message << "\n";
    return exit_numerical;
  }
  log << "simulate: " << traj.size() << " records written to " << dir.string() << "\n";
  return exit_ok;
}

inline int run_consistency(const RunConfig& cfg, const std::filesystem::path& dir, std::ostream& log) {
  SweepConfig sweep{cfg.eta_field(), cfg.bottom_field(), cfg.phi_field(), cfg.spec(), cfg.deltas};
  sweep.gravity = cfg.gravity;
  sweep.depth_floor = cfg.depth_floor;
  sweep.mz = cfg.mz;
  sweep.mz_step = cfg.mz_step;
  sweep.mz_max = cfg.mz_max;
  sweep.exclude_largest = cfg.fit_exclude_largest;
  sweep.ref_fraction = cfg.ref_fraction;
  sweep.solver = SolverOptions{cfg.sweep_tol, std::max(cfg.solver.max_iter, 1000), cfg.solver.restart};
  sweep.jobs = cfg.jobs;
  const SweepResult res = consistency_sweep(sweep);

  {
    CsvWriter csv(dir / "sweep.csv", cfg.hash,
                  {"delta", "H_ww", "H_ik", "abs_diff", "ref_error_bound", "included_in_fit"});
    for (const auto& r : res.rows) {
      csv.row(r.delta, r.h_ww, r.h_ik, r.abs_diff, r.ref_error_bound, r.included_in_fit ? 1 : 0);
    }
  }
  const auto spec = cfg.spec();
  const int expected = cfg.expansion_case == ExpansionCase::H1 ? 4 * spec.order + 2 : 4 * (spec.order / 2) + 2;
  bool pass = res.fitted_rows >= 2 && std::isfinite(res.slope);
  if (cfg.slope_min && !(res.slope >= *cfg.slope_min)) pass = false;
  if (cfg.slope_max && !(res.slope <= *cfg.slope_max)) pass = false;
  SummaryWriter summary(dir / "fit_summary.txt", cfg.hash);
  summary.put("mode", "consistency")
      .put("case", to_string(cfg.expansion_case))
      .put("N", spec.order)
      .put("expected_exponent", expected)
      .put("slope", res.slope)
      .put("slope_stderr", res.slope_stderr)
      .put("slope_ci95_low", res.slope - 1.96 * res.slope_stderr)
      .put("slope_ci95_high", res.slope + 1.96 * res.slope_stderr)
      .put("intercept", res.intercept)
      .put("fitted_rows", res.fitted_rows)
      .put("pass", pass ? "true" : "false");
  log << "consistency: slope " << res.slope << " +/- " << res.slope_stderr << " over " << res.fitted_rows
      << " rows (expected exponent " << expected << ")\n";
  return pass ? exit_ok : exit_check_failed;
}

inline int run_gradcheck(const RunConfig& cfg, const std::filesystem::path& dir, std::ostream& log) {
  const Geometry geom = cfg.geometry();
  const Grid grid = cfg.grid();
  const Field dir_eta = build_profile(grid, cfg.dir_eta, "dir_eta");
  const Field dir_phi = build_profile(grid, cfg.dir_phi, "dir_phi");
  const auto rep = gradcheck(geom, cfg.spec(), cfg.phi_field(), dir_eta, dir_phi, cfg.eps_list,
                             SolverOptions{cfg.gradcheck_tol, cfg.solver.max_iter, cfg.solver.restart});
  {
    CsvWriter csv(dir / "gradcheck.csv", cfg.hash, {"eps", "discrepancy_eta", "discrepancy_phi"});
    for (const auto& r : rep.rows) csv.row(r.eps, r.discrepancy_eta, r.discrepancy_phi);
  }
  double worst_phi = 0.0;
  for (const auto& r : rep.rows) worst_phi = std::max(worst_phi, r.discrepancy_phi);
  const double phi_scale = std::max(1.0, std::abs(rep.pairing_phi));
  const bool eta_active = dir_eta.max_abs() > 0.0;
  const bool order_ok = !eta_active || (rep.observed_order_eta >= cfg.order_min && rep.observed_order_eta <= cfg.order_max);
  const bool phi_ok = worst_phi <= cfg.phi_tol * phi_scale;
  SummaryWriter summary(dir / "gradcheck_summary.txt", cfg.hash);
  summary.put("mode", "gradcheck")
      .put("hamiltonian", rep.hamiltonian)
      .put("pairing_eta", rep.pairing_eta)
      .put("pairing_phi", rep.pairing_phi)
      .put("observed_order_eta", rep.observed_order_eta)
      .put("max_discrepancy_phi", worst_phi)
      .put("pass", order_ok && phi_ok ? "true" : "false");
  log << "gradcheck: eta order " << rep.observed_order_eta << ", max phi discrepancy " << worst_phi << "\n";
  return order_ok && phi_ok ? exit_ok : exit_check_failed;
}

inline int run_selftest_mode(const RunConfig& cfg, const std::filesystem::path& dir, std::ostream& log) {
  const auto checks = run_selftest(cfg.grid(), cfg.delta);
  bool all = true;
  CsvWriter csv(dir / "selftest.csv", cfg.hash, {"check", "measured", "threshold", "pass"});
  for (const auto& c : checks) {
    csv.row("\"" + c.name + "\"", c.measured, c.threshold, c.pass ? 1 : 0);
    log << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << std::scientific << std::setprecision(3) << c.measured
        << " (threshold " << c.threshold << ")\n"
        << std::defaultfloat;
    all = all && c.pass;
  }
  return all ? exit_ok : exit_check_failed;
}

}  // namespace detail

/// Runs one experiment mode and writes its outputs under cfg.output_dir.
/// Returns a process exit code.
inline int run(const RunConfig& cfg, std::ostream& log) {
  const std::filesystem::path dir(cfg.output_dir);
  try {
    std::filesystem::create_directories(dir);
    switch (cfg.mode) {
      case RunMode::simulate: return detail::run_simulate(cfg, dir, log);
      case RunMode::consistency: return detail::run_consistency(cfg, dir, log);
      case RunMode::gradcheck: return detail::run_gradcheck(cfg, dir, log);
      case RunMode::selftest: return detail::run_selftest_mode(cfg, dir, log);
    }
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const InvalidArgument& e) {
    log << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return exit_numerical;
  } catch (const std::filesystem::filesystem_error& e) {
    log << "error: " << e.what() << "\n";
    return exit_usage;
  }
  return exit_usage;
}

}  // namespace ikham

#endif  // IKHAM_RUNNER_HPP
