#ifndef IKHAM_HAMILTONIAN_HPP
#define IKHAM_HAMILTONIAN_HPP

#include <cmath>
#include <vector>

#include "ikham/elliptic.hpp"
#include "ikham/field.hpp"
#include "ikham/geometry.hpp"
#include "ikham/operators.hpp"

namespace ikham {

/// Canonical pair (eta, phi) at time t; phi is the surface trace of the potential.
struct CanonicalState {
  Field eta;
  Field phi;
  double t = 0.0;
};

/// Potential energy (g/2) int eta^2.
inline double potential_energy(const Geometry& geom) {
  return 0.5 * geom.gravity() * inner(geom.eta(), geom.eta());
}

/// IK energy written out term by term in its symmetric integrand form.
inline double energy_ik(const Geometry& geom, const ExpansionSpec& spec, const PotentialVec& phi) {
  detail::check_length(spec, phi);
  std::vector<Field> phi_x;
  phi_x.reserve(phi.size());
  for (const auto& f : phi) phi_x.push_back(deriv(f));

  Field density(geom.grid());
  for (int i = 0; i <= spec.order; ++i) {
    const int pi = spec.p[i];
    for (int j = 0; j <= spec.order; ++j) {
      const int pj = spec.p[j];
      const int q = pi + pj;
      density += (1.0 / (q + 1)) * (geom.power(q + 1) * phi_x[i] * phi_x[j]);
      if (pi != 0) {
        density -= (2.0 * pi / q) * (geom.power(q) * phi[i] * geom.bottom_slope() * phi_x[j]);
      }
      if (pi != 0 && pj != 0) {
        density += (static_cast<double>(pi * pj) / (q - 1)) * (geom.power(q - 1) * geom.vertical_weight() * phi[i] * phi[j]);
      }
    }
  }
  return 0.5 * integrate(density) + potential_energy(geom);
}

/// Result of reconstructing the expansion for a canonical state.
struct Reconstruction {
  PotentialVec phi;
  SolveReport report;
};

inline Reconstruction reconstruct(const Geometry& geom, const ExpansionSpec& spec, const Field& phi_surface,
                                  const SolverOptions& opt, const PotentialVec* warm = nullptr) {
  auto sol = solve_S(geom, spec, phi_surface, opt, warm);
  require_converged(sol.report, "S(eta) solve");
  return {std::move(sol.phi), sol.report};
}

/// Hamiltonian H^{IK,delta}(eta, phi) = E^{IK,delta}(eta, S(eta) phi).
inline double hamiltonian_ik(const Geometry& geom, const ExpansionSpec& spec, const Field& phi_surface,
                             const SolverOptions& opt = {}) {
  return energy_ik(geom, spec, reconstruct(geom, spec, phi_surface, opt).phi);
}

/// Variational derivatives evaluated from an already reconstructed expansion.
struct Variations {
  Field d_phi;  ///< delta H / delta phi = L_0 phi
  Field d_eta;  ///< delta H / delta eta
};

inline Variations variations_from(const Geometry& geom, const ExpansionSpec& spec, const PotentialVec& phi) {
  Field l0 = apply_L0(geom, spec, phi);
  const auto vel = surface_trace_velocity(geom, spec, phi);
  const double inv_delta2 = 1.0 / (geom.delta() * geom.delta());
  Field d_eta = 0.5 * (vel.u * vel.u) + (0.5 * inv_delta2) * (vel.w * vel.w) + geom.gravity() * geom.eta();
  d_eta -= l_prime_dot(geom, spec, phi) * l0;
  return {std::move(l0), std::move(d_eta)};
}

inline Field var_phi(const Geometry& geom, const ExpansionSpec& spec, const Field& phi_surface,
                     const SolverOptions& opt = {}) {
  return apply_L0(geom, spec, reconstruct(geom, spec, phi_surface, opt).phi);
}

inline Field var_eta(const Geometry& geom, const ExpansionSpec& spec, const Field& phi_surface,
                     const SolverOptions& opt = {}) {
  return variations_from(geom, spec, reconstruct(geom, spec, phi_surface, opt).phi).d_eta;
}

struct GradcheckRow {
  double eps = 0.0;
  double discrepancy_eta = 0.0;  ///< |central difference - <d_eta H, direction_eta>|
  double discrepancy_phi = 0.0;  ///< |central difference - <d_phi H, direction_phi>|
};

struct GradcheckReport {
  std::vector<GradcheckRow> rows;
  double pairing_eta = 0.0;
  double pairing_phi = 0.0;
  double observed_order_eta = 0.0;  ///< least-squares slope of log discrepancy_eta vs log eps
  double hamiltonian = 0.0;
};

/// Least-squares slope of log y against log x over entries with y > 0.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0.0) || !(x[i] > 0.0)) continue;
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::nan("");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Compares central differences of H^{IK,delta} against the pairing of the
/// variational derivatives with the given directions, for each eps.
inline GradcheckReport gradcheck(const Geometry& geom, const ExpansionSpec& spec, const Field& phi_surface,
                                 const Field& direction_eta, const Field& direction_phi,
                                 const std::vector<double>& eps_list, const SolverOptions& opt = {}) {
  GradcheckReport out;
  const auto rec = reconstruct(geom, spec, phi_surface, opt);
  const auto var = variations_from(geom, spec, rec.phi);
  out.hamiltonian = energy_ik(geom, spec, rec.phi);
  out.pairing_eta = inner(var.d_eta, direction_eta);
  out.pairing_phi = inner(var.d_phi, direction_phi);
  const bool eta_zero = direction_eta.max_abs() == 0.0;
  const bool phi_zero = direction_phi.max_abs() == 0.0;

  std::vector<double> eps_values;
  std::vector<double> disc;
  for (double eps : eps_list) {
    GradcheckRow row;
    row.eps = eps;
    if (!eta_zero) {
      const double hp = hamiltonian_ik(geom.with_eta(geom.eta() + eps * direction_eta), spec, phi_surface, opt);
      const double hm = hamiltonian_ik(geom.with_eta(geom.eta() - eps * direction_eta), spec, phi_surface, opt);
      row.discrepancy_eta = std::abs((hp - hm) / (2.0 * eps) - out.pairing_eta);
    }
    if (!phi_zero) {
      const double hp = hamiltonian_ik(geom, spec, phi_surface + eps * direction_phi, opt);
      const double hm = hamiltonian_ik(geom, spec, phi_surface - eps * direction_phi, opt);
      row.discrepancy_phi = std::abs((hp - hm) / (2.0 * eps) - out.pairing_phi);
    }
    eps_values.push_back(eps);
    disc.push_back(row.discrepancy_eta);
    out.rows.push_back(row);
  }
  out.observed_order_eta = eta_zero ? 0.0 : loglog_slope(eps_values, disc);
  return out;
}

}  // namespace ikham

#endif  // IKHAM_HAMILTONIAN_HPP
