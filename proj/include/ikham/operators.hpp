#ifndef IKHAM_OPERATORS_HPP
#define IKHAM_OPERATORS_HPP

#include <string>
#include <utility>
#include <vector>

#include "ikham/field.hpp"
#include "ikham/geometry.hpp"

namespace ikham {

/// Coefficient fields (phi_0, ..., phi_N) of the vertical expansion.
using PotentialVec = std::vector<Field>;

inline PotentialVec zero_potential(const Grid& grid, int count) { return PotentialVec(count, Field(grid)); }

namespace detail {

inline void check_index(const ExpansionSpec& spec, int i) {
  if (i < 0 || i > spec.order) {
    throw IndexOutOfRange("operator index " + std::to_string(i) + " outside [0, " + std::to_string(spec.order) + "]");
  }
}

inline void check_length(const ExpansionSpec& spec, const PotentialVec& phi) {
  if (static_cast<int>(phi.size()) != spec.size()) {
    throw InvalidArgument("potential vector has " + std::to_string(phi.size()) + " components, expected " +
                          std::to_string(spec.size()));
  }
}

}  // namespace detail

/// L_ij psi for the dimensionless operator
///   -d/dx( H^{q+1}/(q+1) psi_x - p_j/q H^q psi b_x ) - p_i/q H^q b_x psi_x
///   + p_i p_j/(q-1) H^{q-1} (delta^{-2} + b_x^2) psi,    q = p_i + p_j.
/// Terms with a vanishing p-factor are skipped, which realises 0/0 = 0.
inline Field apply_Lij(const Geometry& geom, const ExpansionSpec& spec, int i, int j, const Field& psi) {
  detail::check_index(spec, i);
  detail::check_index(spec, j);
  psi.check_same(geom.eta());
  const int pi = spec.p[i];
  const int pj = spec.p[j];
  const int q = pi + pj;
  const Field psi_x = deriv(psi);

  Field flux = (1.0 / (q + 1)) * (geom.power(q + 1) * psi_x);
  if (pj != 0) flux -= (static_cast<double>(pj) / q) * (geom.power(q) * psi * geom.bottom_slope());
  Field out = -deriv(flux);
  if (pi != 0) out -= (static_cast<double>(pi) / q) * (geom.power(q) * geom.bottom_slope() * psi_x);
  if (pi != 0 && pj != 0) {
    out += (static_cast<double>(pi * pj) / (q - 1)) * (geom.power(q - 1) * geom.vertical_weight() * psi);
  }
  return out;
}

/// (L phi)_i = sum_j L_ij phi_j for i = 0..N.
inline std::vector<Field> apply_L(const Geometry& geom, const ExpansionSpec& spec, const PotentialVec& phi) {
  detail::check_length(spec, phi);
  std::vector<Field> out;
  out.reserve(spec.size());
  for (int i = 0; i <= spec.order; ++i) {
    Field acc(geom.grid());
    for (int j = 0; j <= spec.order; ++j) acc += apply_Lij(geom, spec, i, j, phi[j]);
    out.push_back(std::move(acc));
  }
  return out;
}

/// L_0 phi = sum_j L_0j phi_j.
inline Field apply_L0(const Geometry& geom, const ExpansionSpec& spec, const PotentialVec& phi) {
  detail::check_length(spec, phi);
  Field acc(geom.grid());
  for (int j = 0; j <= spec.order; ++j) acc += apply_Lij(geom, spec, 0, j, phi[j]);
  return acc;
}

/// l(H) = (H^{p_0}, ..., H^{p_N}).
inline std::vector<Field> l_vec(const Geometry& geom, const ExpansionSpec& spec) {
  std::vector<Field> out;
  out.reserve(spec.size());
  for (int p : spec.p) out.push_back(geom.power(p));
  return out;
}

/// l(H) . phi, the surface trace of the ansatz.
inline Field l_dot(const Geometry& geom, const ExpansionSpec& spec, const PotentialVec& phi) {
  detail::check_length(spec, phi);
  Field acc(geom.grid());
  for (int j = 0; j <= spec.order; ++j) acc += geom.power(spec.p[j]) * phi[j];
  return acc;
}

/// l'(H) . phi = sum_{j>=1} p_j H^{p_j - 1} phi_j.
inline Field l_prime_dot(const Geometry& geom, const ExpansionSpec& spec, const PotentialVec& phi) {
  detail::check_length(spec, phi);
  Field acc(geom.grid());
  for (int j = 1; j <= spec.order; ++j) acc += static_cast<double>(spec.p[j]) * (geom.power(spec.p[j] - 1) * phi[j]);
  return acc;
}

/// Constraint operators (calL_1 phi, ..., calL_N phi) with
/// calL_i phi = (L phi)_i - H^{p_i} (L phi)_0.
inline std::vector<Field> apply_calL(const Geometry& geom, const ExpansionSpec& spec, const PotentialVec& phi) {
  detail::check_length(spec, phi);
  std::vector<Field> out;
  if (spec.order == 0) return out;
  const auto lphi = apply_L(geom, spec, phi);
  out.reserve(spec.order);
  for (int i = 1; i <= spec.order; ++i) out.push_back(lphi[i] - geom.power(spec.p[i]) * lphi[0]);
  return out;
}

struct SurfaceVelocity {
  Field u;  ///< horizontal trace of grad Phi^app at z = eta
  Field w;  ///< vertical trace of d_z Phi^app at z = eta, without the delta^{-2} weight
};

inline SurfaceVelocity surface_trace_velocity(const Geometry& geom, const ExpansionSpec& spec, const PotentialVec& phi) {
  detail::check_length(spec, phi);
  Field u(geom.grid());
  Field w(geom.grid());
  for (int j = 0; j <= spec.order; ++j) {
    const int pj = spec.p[j];
    u += geom.power(pj) * deriv(phi[j]);
    if (pj != 0) {
      const Field c = static_cast<double>(pj) * (geom.power(pj - 1) * phi[j]);
      u -= c * geom.bottom_slope();
      w += c;
    }
  }
  return {std::move(u), std::move(w)};
}

/// Derivative of L_ij with respect to H in direction etadot, applied to psi.
inline Field apply_DHLij(const Geometry& geom, const ExpansionSpec& spec, int i, int j, const Field& etadot,
                         const Field& psi) {
  detail::check_index(spec, i);
  detail::check_index(spec, j);
  const int pi = spec.p[i];
  const int pj = spec.p[j];
  const int q = pi + pj;
  const Field psi_x = deriv(psi);

  Field flux = geom.power(q) * psi_x;
  if (pj != 0) flux -= static_cast<double>(pj) * (geom.power(q - 1) * psi * geom.bottom_slope());
  Field out = -deriv(etadot * flux);
  if (pi != 0) out -= static_cast<double>(pi) * (etadot * geom.power(q - 1) * geom.bottom_slope() * psi_x);
  if (pi != 0 && pj != 0) {
    out += static_cast<double>(pi * pj) * (etadot * geom.power(q - 2) * geom.vertical_weight() * psi);
  }
  return out;
}

/// D_H calL_i [etadot] phi for i = 1..N.
inline std::vector<Field> apply_DHL(const Geometry& geom, const ExpansionSpec& spec, const Field& etadot,
                                    const PotentialVec& phi) {
  detail::check_length(spec, phi);
  std::vector<Field> out;
  if (spec.order == 0) return out;

  Field dl0(geom.grid());
  for (int j = 0; j <= spec.order; ++j) dl0 += apply_DHLij(geom, spec, 0, j, etadot, phi[j]);
  const Field l0 = apply_L0(geom, spec, phi);

  out.reserve(spec.order);
  for (int i = 1; i <= spec.order; ++i) {
    const int pi = spec.p[i];
    Field acc(geom.grid());
    for (int j = 0; j <= spec.order; ++j) acc += apply_DHLij(geom, spec, i, j, etadot, phi[j]);
    acc -= geom.power(pi) * dl0;
    acc -= static_cast<double>(pi) * (geom.power(pi - 1) * etadot * l0);
    out.push_back(std::move(acc));
  }
  return out;
}

}  // namespace ikham

#endif  // IKHAM_OPERATORS_HPP
