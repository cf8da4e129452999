#ifndef IKHAM_TIME_STEPPER_HPP
#define IKHAM_TIME_STEPPER_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ikham/hamiltonian.hpp"

namespace ikham {

/// Raised when an RK stage leaves the admissible set or its solve fails.
class StepError : public Error {
 public:
  StepError(int stage, const std::string& what)
      : Error("RK stage " + std::to_string(stage) + ": " + what), stage_(stage) {}
  int stage() const noexcept { return stage_; }

 private:
  int stage_;
};

struct CanonicalRhs {
  Field deta;
  Field dphi;
  PotentialVec phi;  ///< reconstructed S(eta) phi, reusable as a warm start
};

/// Hamilton's equations d_t eta = delta H / delta phi, d_t phi = -delta H / delta eta,
/// with the geometry rebuilt from state.eta over the template's bathymetry.
inline CanonicalRhs rhs(const Geometry& geom_template, const ExpansionSpec& spec, const CanonicalState& state,
                        const SolverOptions& opt = {}, const PotentialVec* warm = nullptr) {
  const Geometry geom = geom_template.with_eta(state.eta);
  auto rec = reconstruct(geom, spec, state.phi, opt, warm);
  auto var = variations_from(geom, spec, rec.phi);
  return {std::move(var.d_phi), -var.d_eta, std::move(rec.phi)};
}

/// Classical four-stage Runge-Kutta step. `warm` carries the last
/// reconstruction between calls and is updated in place.
inline CanonicalState step_rk4(const Geometry& geom_template, const ExpansionSpec& spec, const CanonicalState& state,
                               double dt, const SolverOptions& opt, std::optional<PotentialVec>& warm) {
  auto stage = [&](int index, const CanonicalState& s) {
    try {
      auto r = rhs(geom_template, spec, s, opt, warm ? &*warm : nullptr);
      warm = r.phi;
      return r;
    } catch (const Error& e) {
      throw StepError(index, e.what());
    }
  };
  auto shifted = [&](const CanonicalRhs& k, double h) {
    return CanonicalState{state.eta + h * k.deta, state.phi + h * k.dphi, state.t + h};
  };

  const auto k1 = stage(1, state);
  const auto k2 = stage(2, shifted(k1, 0.5 * dt));
  const auto k3 = stage(3, shifted(k2, 0.5 * dt));
  const auto k4 = stage(4, shifted(k3, dt));

  return CanonicalState{state.eta + (dt / 6.0) * (k1.deta + 2.0 * k2.deta + 2.0 * k3.deta + k4.deta),
                        state.phi + (dt / 6.0) * (k1.dphi + 2.0 * k2.dphi + 2.0 * k3.dphi + k4.dphi), state.t + dt};
}

inline CanonicalState step_rk4(const Geometry& geom_template, const ExpansionSpec& spec, const CanonicalState& state,
                               double dt, const SolverOptions& opt = {}) {
  std::optional<PotentialVec> warm;
  return step_rk4(geom_template, spec, state, dt, opt, warm);
}

/// max_i ||H^{p_i} deta - (L phi)_i|| / (1 + ||deta||): how far the
/// reconstructed expansion is from satisfying every IK evolution equation.
inline double ik_residual(const Geometry& geom, const ExpansionSpec& spec, const PotentialVec& phi, const Field& deta) {
  const auto lphi = apply_L(geom, spec, phi);
  const double scale = 1.0 + norm(deta);
  double worst = 0.0;
  for (int i = 0; i <= spec.order; ++i) {
    worst = std::max(worst, norm(geom.power(spec.p[i]) * deta - lphi[i]) / scale);
  }
  return worst;
}

inline double constraint_norm(const Geometry& geom, const ExpansionSpec& spec, const PotentialVec& phi) {
  double sq = 0.0;
  for (const auto& c : apply_calL(geom, spec, phi)) sq += inner(c, c);
  return std::sqrt(sq);
}

struct SimulationConfig {
  Geometry geometry;  ///< bathymetry and physics; its eta is replaced by the state's
  ExpansionSpec spec;
  CanonicalState initial;
  double dt = 1e-2;
  int steps = 100;
  int record_every = 1;
  SolverOptions solver;
  /// Abort once |H(t) - H(0)| exceeds this multiple of max(|H(0)|, tiny).
  double instability_threshold = 0.5;
};

enum class SimulationStatus { ok, depth_floor, solver_failure, instability };

inline std::string to_string(SimulationStatus s) {
  switch (s) {
    case SimulationStatus::ok: return "ok";
    case SimulationStatus::depth_floor: return "depth floor violated";
    case SimulationStatus::solver_failure: return "solver failure";
    case SimulationStatus::instability: return "instability detected";
  }
  return "unknown";
}

struct Trajectory {
  std::vector<CanonicalState> states;
  std::vector<double> energies;
  std::vector<double> constraint_residuals;
  std::vector<double> ik_residuals;
  SimulationStatus status = SimulationStatus::ok;
  std::string message;

  std::size_t size() const noexcept { return states.size(); }
  bool ok() const noexcept { return status == SimulationStatus::ok; }
};

namespace detail {

inline void record(Trajectory& traj, const Geometry& geom_template, const ExpansionSpec& spec,
                   const CanonicalState& state, const SolverOptions& opt, std::optional<PotentialVec>& warm) {
  const Geometry geom = geom_template.with_eta(state.eta);
  auto rec = reconstruct(geom, spec, state.phi, opt, warm ? &*warm : nullptr);
  const Field deta = apply_L0(geom, spec, rec.phi);
  traj.states.push_back(state);
  traj.energies.push_back(energy_ik(geom, spec, rec.phi));
  traj.constraint_residuals.push_back(constraint_norm(geom, spec, rec.phi));
  traj.ik_residuals.push_back(ik_residual(geom, spec, rec.phi, deta));
  warm = std::move(rec.phi);
}

}  // namespace detail

/// Integrates Hamilton's equations with RK4, recording energy and residual
/// diagnostics every `record_every` steps. Failures stop the run and are
/// reported through the trajectory status; the recorded prefix is kept.
inline Trajectory simulate(const SimulationConfig& cfg) {
  if (cfg.dt == 0.0 || !std::isfinite(cfg.dt)) throw InvalidArgument("time step must be finite and non-zero");
  if (cfg.steps < 0 || cfg.record_every < 1) throw InvalidArgument("invalid step count or record cadence");
  Trajectory traj;
  std::optional<PotentialVec> warm;
  CanonicalState state = cfg.initial;
  try {
    detail::record(traj, cfg.geometry, cfg.spec, state, cfg.solver, warm);
    const double e0 = traj.energies.front();
    const double scale = std::max(std::abs(e0), 1e-300);
    for (int n = 1; n <= cfg.steps; ++n) {
      state = step_rk4(cfg.geometry, cfg.spec, state, cfg.dt, cfg.solver, warm);
      if (!state.eta.is_finite() || !state.phi.is_finite()) {
        traj.status = SimulationStatus::instability;
        traj.message = "instability detected: non-finite state at step " + std::to_string(n);
        return traj;
      }
      if (n % cfg.record_every == 0 || n == cfg.steps) {
        detail::record(traj, cfg.geometry, cfg.spec, state, cfg.solver, warm);
        const double drift = std::abs(traj.energies.back() - e0);
        if (!std::isfinite(traj.energies.back()) || (e0 != 0.0 && drift > cfg.instability_threshold * scale) ||
            (e0 == 0.0 && drift > 0.0)) {
          traj.status = SimulationStatus::instability;
          traj.message = "instability detected: energy drift " + std::to_string(drift) + " at t = " +
                         std::to_string(state.t);
          return traj;
        }
      }
    }
  } catch (const InvalidGeometry& e) {
    traj.status = SimulationStatus::depth_floor;
    traj.message = e.what();
  } catch (const StepError& e) {
    const std::string what = e.what();
    traj.status = what.find("depth floor") != std::string::npos ? SimulationStatus::depth_floor
                                                                 : SimulationStatus::solver_failure;
    traj.message = what;
  } catch (const SolverError& e) {
    traj.status = SimulationStatus::solver_failure;
    traj.message = e.what();
  }
  return traj;
}

}  // namespace ikham

#endif  // IKHAM_TIME_STEPPER_HPP
