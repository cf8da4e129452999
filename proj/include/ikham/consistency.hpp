#ifndef IKHAM_CONSISTENCY_HPP
#define IKHAM_CONSISTENCY_HPP

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>
#include <vector>

#include "ikham/hamiltonian.hpp"
#include "ikham/reference_ww.hpp"

namespace ikham {

struct SweepConfig {
  Field eta;
  Field bottom;
  Field phi;
  ExpansionSpec spec;
  std::vector<double> deltas;
  double gravity = 1.0;
  double depth_floor = 1e-3;
  int mz = 16;          ///< initial vertical resolution of the reference solver
  int mz_step = 8;
  int mz_max = 48;
  int exclude_largest = 1;  ///< number of largest deltas left out of the fit
  double ref_fraction = 0.01;  ///< reference bound must be below this fraction of |diff|
  SolverOptions solver{1e-13, 1000, 80};
  int jobs = 1;
};

struct SweepRow {
  double delta = 0.0;
  double h_ww = 0.0;
  double h_ik = 0.0;
  double abs_diff = 0.0;
  double ref_error_bound = 0.0;
  int mz = 0;
  bool included_in_fit = false;
  bool reference_dominated = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double slope = std::nan("");
  double slope_stderr = std::nan("");
  double intercept = std::nan("");
  int fitted_rows = 0;
};

struct LinearFit {
  double slope = std::nan("");
  double intercept = std::nan("");
  double slope_stderr = std::nan("");
};

inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LinearFit fit;
  const std::size_t n = x.size();
  if (n < 2) return fit;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    double rss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += r * r;
    }
    fit.slope_stderr = std::sqrt(rss / (n - 2) / sxx);
  } else {
    fit.slope_stderr = 0.0;
  }
  return fit;
}

/// One row: IK Hamiltonian against the reference, escalating the reference's
/// vertical resolution until two successive levels agree to ref_fraction of the gap.
inline SweepRow sweep_row(const SweepConfig& cfg, double delta) {
  SweepRow row;
  row.delta = delta;
  const Geometry geom(cfg.eta, cfg.bottom, delta, cfg.gravity, cfg.depth_floor, cfg.spec);
  row.h_ik = hamiltonian_ik(geom, cfg.spec, cfg.phi, cfg.solver);

  int mz = cfg.mz;
  double coarse = hamiltonian_ww(cfg.eta, cfg.bottom, cfg.phi, delta, mz, cfg.gravity, cfg.depth_floor);
  for (;;) {
    const int fine_mz = mz + cfg.mz_step;
    const double fine = hamiltonian_ww(cfg.eta, cfg.bottom, cfg.phi, delta, fine_mz, cfg.gravity, cfg.depth_floor);
    row.h_ww = fine;
    row.mz = fine_mz;
    row.ref_error_bound = std::abs(fine - coarse);
    row.abs_diff = std::abs(fine - row.h_ik);
    if (row.ref_error_bound < cfg.ref_fraction * row.abs_diff || fine_mz + cfg.mz_step > cfg.mz_max) break;
    mz = fine_mz;
    coarse = fine;
  }
  row.reference_dominated = !(row.ref_error_bound < cfg.ref_fraction * row.abs_diff);
  return row;
}

/// Evaluates both Hamiltonians across the delta list and fits the slope of
/// log|H_ww - H_ik| against log delta.
inline SweepResult consistency_sweep(const SweepConfig& cfg) {
  if (cfg.deltas.empty()) throw InvalidArgument("delta list is empty");
  SweepResult result;
  result.rows.resize(cfg.deltas.size());
  const int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(cfg.deltas.size())));
  if (jobs == 1) {
    for (std::size_t i = 0; i < cfg.deltas.size(); ++i) result.rows[i] = sweep_row(cfg, cfg.deltas[i]);
  } else {
    std::vector<std::exception_ptr> errors(jobs);
    std::vector<std::thread> workers;
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < cfg.deltas.size(); i += jobs) result.rows[i] = sweep_row(cfg, cfg.deltas[i]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : workers) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  std::vector<double> sorted = cfg.deltas;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const int excluded = std::clamp(cfg.exclude_largest, 0, static_cast<int>(sorted.size()));
  const double cutoff = excluded > 0 ? sorted[excluded - 1] : std::numeric_limits<double>::infinity();

  std::vector<double> lx, ly;
  for (auto& row : result.rows) {
    row.included_in_fit = !row.reference_dominated && row.delta < cutoff && row.abs_diff > 0.0;
    if (row.included_in_fit) {
      lx.push_back(std::log(row.delta));
      ly.push_back(std::log(row.abs_diff));
    }
  }
  result.fitted_rows = static_cast<int>(lx.size());
  const auto fit = fit_line(lx, ly);
  result.slope = fit.slope;
  result.intercept = fit.intercept;
  result.slope_stderr = fit.slope_stderr;
  return result;
}

/// n values geometrically spaced from hi down to lo.
inline std::vector<double> geometric_deltas(double lo, double hi, int n) {
  if (n < 2 || !(lo > 0.0) || !(hi > lo)) throw InvalidArgument("invalid geometric delta range");
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = hi * std::pow(lo / hi, static_cast<double>(i) / (n - 1));
  return out;
}

}  // namespace ikham

#endif  // IKHAM_CONSISTENCY_HPP
