#ifndef IKHAM_SELFTEST_HPP
#define IKHAM_SELFTEST_HPP

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "ikham/elliptic.hpp"
#include "ikham/hamiltonian.hpp"
#include "ikham/random_fields.hpp"
#include "ikham/reference_ww.hpp"
#include "ikham/time_stepper.hpp"

namespace ikham {

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

/// Quick invariant suite: operator adjointness, solver residual and
/// manufactured-solution recovery, gauge/linearity of S, the full-system
/// identity L phi = (L_0 phi) l(H), and the flat reference-solver check.
inline std::vector<CheckResult> run_selftest(const Grid& grid, double delta, unsigned seed = 7) {
  std::vector<CheckResult> out;
  auto add = [&](std::string name, double measured, double threshold) {
    out.push_back({std::move(name), measured, threshold, measured <= threshold && std::isfinite(measured)});
  };
  std::mt19937_64 rng(seed);
  const ExpansionSpec h2(ExpansionCase::H2, 2);
  const Field eta = random_smooth(grid, rng, 4, 0.1);
  const Field bottom = random_smooth(grid, rng, 4, 0.1);
  const Geometry geom(eta, bottom, delta, 1.0, 1e-3, h2);

  {
    double worst = 0.0;
    const Field u = random_smooth(grid, rng, 6, 1.0);
    const Field v = random_smooth(grid, rng, 6, 1.0);
    for (int i = 0; i <= h2.order; ++i) {
      for (int j = 0; j <= h2.order; ++j) {
        const double lhs = inner(apply_Lij(geom, h2, i, j, u), v);
        const double rhs = inner(u, apply_Lij(geom, h2, j, i, v));
        const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
        worst = std::max(worst, std::abs(lhs - rhs) / scale);
      }
    }
    add("adjointness L_ij* = L_ji", worst, 1e-10);
  }

  {
    PotentialVec target;
    for (int j = 0; j <= h2.order; ++j) target.push_back(random_smooth(grid, rng, 4, 1.0));
    const Field f0 = l_dot(geom, h2, target);
    const auto fvec = apply_calL(geom, h2, target);
    const auto sol = solve_general(geom, h2, f0, fvec, SolverOptions{1e-12, 500, 60});
    double err = 0.0, ref = 0.0;
    for (int j = 0; j <= h2.order; ++j) {
      const Field d = sol.phi[j] - target[j];
      err += inner(d, d);
      ref += inner(target[j], target[j]);
    }
    add("manufactured solution recovery", std::sqrt(err / ref), 1e-8);
  }

  const SolverOptions opt{1e-12, 500, 60};
  const Field phi = random_smooth(grid, rng, 5, 1.0);
  const Field chi = random_smooth(grid, rng, 5, 1.0);
  {
    const double h0 = hamiltonian_ik(geom, h2, phi, opt);
    const double h1 = hamiltonian_ik(geom, h2, phi + 3.7, opt);
    add("gauge invariance H(phi + c) = H(phi)", std::abs(h1 - h0) / std::max(1.0, std::abs(h0)), 1e-9);
  }
  {
    const auto a = solve_S(geom, h2, phi, opt).phi;
    const auto b = solve_S(geom, h2, chi, opt).phi;
    const auto ab = solve_S(geom, h2, 2.0 * phi - 0.5 * chi, opt).phi;
    double err = 0.0, ref = 0.0;
    for (int j = 0; j <= h2.order; ++j) {
      const Field d = ab[j] - (2.0 * a[j] - 0.5 * b[j]);
      err += inner(d, d);
      ref += inner(ab[j], ab[j]);
    }
    add("linearity of S(eta)", std::sqrt(err / ref), 1e-9);
  }
  {
    const auto phivec = solve_S(geom, h2, phi, opt).phi;
    const Field deta = apply_L0(geom, h2, phivec);
    add("IK equivalence residual", ik_residual(geom, h2, phivec, deta), 1e-8);
  }
  {
    const Grid g = grid;
    const Field zero(g);
    const Field f = random_smooth(g, rng, 6, 1.0);
    const double ww = hamiltonian_ww(zero, zero, f, delta, 24);
    const double dtn = 0.5 * inner(f, dtn_flat(f, delta));
    add("reference solver vs flat DtN", std::abs(ww - dtn) / std::max(1.0, std::abs(dtn)), 1e-9);
  }
  return out;
}

}  // namespace ikham

#endif  // IKHAM_SELFTEST_HPP
