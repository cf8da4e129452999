#ifndef IKHAM_ELLIPTIC_HPP
#define IKHAM_ELLIPTIC_HPP

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ikham/field.hpp"
#include "ikham/geometry.hpp"
#include "ikham/gmres.hpp"
#include "ikham/operators.hpp"

namespace ikham {

struct SolverOptions {
  double tol = 1e-10;
  int max_iter = 500;
  int restart = 60;
};

struct EllipticSolution {
  PotentialVec phi;
  SolveReport report;
};

inline void require_converged(const SolveReport& report, const char* what) {
  if (!report.converged) {
    throw SolverError(std::string(what) + ": no convergence after " + std::to_string(report.iterations) +
                      " iterations (relative residual " + std::to_string(report.final_residual) + ")");
  }
}

/// Symbol of L_ij on a flat state of constant depth `depth` with weight
/// `weight` standing in for delta^{-2} + b_x^2.
inline double flat_symbol(const ExpansionSpec& spec, int i, int j, double k, double depth, double weight) {
  const int pi = spec.p[i];
  const int pj = spec.p[j];
  const int q = pi + pj;
  double s = k * k * std::pow(depth, q + 1) / (q + 1);
  if (pi != 0 && pj != 0) s += static_cast<double>(pi * pj) / (q - 1) * std::pow(depth, q - 1) * weight;
  return s;
}

/// Per-mode inverse of the reduced constraint operator on the flat state
/// (constant depth equal to the mean of H). Used as the Krylov preconditioner.
class FlatPreconditioner {
 public:
  FlatPreconditioner(const Geometry& geom, const ExpansionSpec& spec) : grid_(geom.grid()), n_(spec.order) {
    const double hbar = geom.depth().mean();
    const double wbar = geom.vertical_weight().mean();
    const int modes = grid_.size() / 2 + 1;
    inverses_.reserve(modes);
    for (int m = 0; m < modes; ++m) {
      const double k = grid_.wavenumber(m);
      Eigen::MatrixXd a(n_, n_);
      for (int i = 1; i <= n_; ++i) {
        const double hpi = std::pow(hbar, spec.p[i]);
        const double li0 = flat_symbol(spec, i, 0, k, hbar, wbar) - hpi * flat_symbol(spec, 0, 0, k, hbar, wbar);
        for (int j = 1; j <= n_; ++j) {
          const double lij = flat_symbol(spec, i, j, k, hbar, wbar) - hpi * flat_symbol(spec, 0, j, k, hbar, wbar);
          a(i - 1, j - 1) = lij - std::pow(hbar, spec.p[j]) * li0;
        }
      }
      inverses_.push_back(a.inverse());
    }
  }

  Eigen::VectorXd operator()(const Eigen::VectorXd& v) const {
    const int size = grid_.size();
    std::vector<std::vector<std::complex<double>>> spectra;
    spectra.reserve(n_);
    for (int i = 0; i < n_; ++i) spectra.push_back(forward_transform(Field(grid_, v.segment(i * size, size).array())));
    Eigen::VectorXd out(v.size());
    std::vector<std::vector<std::complex<double>>> result(n_, std::vector<std::complex<double>>(spectra[0].size()));
    for (std::size_t m = 0; m < spectra[0].size(); ++m) {
      for (int i = 0; i < n_; ++i) {
        std::complex<double> acc = 0.0;
        for (int j = 0; j < n_; ++j) acc += inverses_[m](i, j) * spectra[j][m];
        result[i][m] = acc;
      }
    }
    for (int i = 0; i < n_; ++i) out.segment(i * size, size) = inverse_transform(grid_, result[i]).values().matrix();
    return out;
  }

 private:
  Grid grid_;
  int n_;
  std::vector<Eigen::MatrixXd> inverses_;
};

namespace detail {

inline Eigen::VectorXd pack(const std::vector<Field>& fields, int first) {
  const int size = fields.front().size();
  const int count = static_cast<int>(fields.size()) - first;
  Eigen::VectorXd v(count * size);
  for (int i = 0; i < count; ++i) v.segment(i * size, size) = fields[first + i].values().matrix();
  return v;
}

/// Rebuilds the full potential vector from the reduced unknowns
/// (phi_1..phi_N) and the algebraic constraint l(H).phi = F0.
inline PotentialVec unpack_full(const Geometry& geom, const ExpansionSpec& spec, const Field& f0,
                                const Eigen::VectorXd& reduced) {
  const Grid& grid = geom.grid();
  const int size = grid.size();
  PotentialVec phi(spec.size(), Field(grid));
  phi[0] = f0;
  for (int j = 1; j <= spec.order; ++j) {
    phi[j] = Field(grid, reduced.segment((j - 1) * size, size).array());
    phi[0] -= geom.power(spec.p[j]) * phi[j];
  }
  return phi;
}

}  // namespace detail

/// Solves  l(H).phi = F0,  calL(H,b) phi = F  for phi = (phi_0, ..., phi_N).
/// phi_0 is eliminated through the algebraic first equation; the remaining
/// N-component system is solved with preconditioned GMRES. Stops once
/// ||calL phi - F|| <= tol * min(||reduced rhs||, ||F|| + 1).
inline EllipticSolution solve_general(const Geometry& geom, const ExpansionSpec& spec, const Field& f0,
                                      const std::vector<Field>& fvec, const SolverOptions& opt = {},
                                      const PotentialVec* initial_guess = nullptr) {
  check_compatible(geom, spec);
  f0.check_same(geom.eta());
  if (!(opt.tol > 0.0)) throw InvalidArgument("solver tolerance must be positive");
  if (static_cast<int>(fvec.size()) != spec.order) {
    throw InvalidArgument("constraint right-hand side needs " + std::to_string(spec.order) + " components");
  }
  EllipticSolution sol;
  if (spec.order == 0) {
    sol.phi = {f0};
    sol.report.converged = true;
    return sol;
  }

  const Grid& grid = geom.grid();
  const Field zero(grid);
  auto reduced_operator = [&](const Eigen::VectorXd& r) {
    return detail::pack(apply_calL(geom, spec, detail::unpack_full(geom, spec, zero, r)), 0);
  };

  PotentialVec lifted(spec.size(), zero);
  lifted[0] = f0;
  const Eigen::VectorXd fpacked = detail::pack(fvec, 0);
  const Eigen::VectorXd rhs = fpacked - detail::pack(apply_calL(geom, spec, lifted), 0);

  Eigen::VectorXd x = Eigen::VectorXd::Zero(rhs.size());
  if (initial_guess != nullptr) {
    detail::check_length(spec, *initial_guess);
    x = detail::pack(*initial_guess, 1);
  }

  const double sqrt_dx = std::sqrt(grid.spacing());
  GmresOptions gopt;
  gopt.tol = opt.tol;
  gopt.max_iter = opt.max_iter;
  gopt.restart = opt.restart;
  // Euclidean norms of packed vectors are L2 norms divided by sqrt(dx).
  gopt.reference_norm = std::min(rhs.norm(), fpacked.norm() + 1.0 / sqrt_dx);

  const FlatPreconditioner precond(geom, spec);
  sol.report = gmres(reduced_operator, precond, rhs, x, gopt);
  sol.phi = detail::unpack_full(geom, spec, f0, x);
  return sol;
}

/// phi = S(eta) phi_surface: the expansion coefficients whose surface trace is
/// phi_surface and which satisfy the compatibility constraints.
inline EllipticSolution solve_S(const Geometry& geom, const ExpansionSpec& spec, const Field& phi_surface,
                                const SolverOptions& opt = {}, const PotentialVec* initial_guess = nullptr) {
  return solve_general(geom, spec, phi_surface, std::vector<Field>(spec.order, Field(geom.grid())), opt,
                       initial_guess);
}

/// Frechet derivative D_eta S(eta)[etadot] phi_surface, given phi = S(eta) phi_surface.
inline EllipticSolution frechet_S(const Geometry& geom, const ExpansionSpec& spec, const PotentialVec& phi,
                                  const Field& etadot, const SolverOptions& opt = {}) {
  const Field f0 = -(l_prime_dot(geom, spec, phi) * etadot);
  std::vector<Field> fvec = apply_DHL(geom, spec, etadot, phi);
  for (auto& f : fvec) f *= -1.0;
  return solve_general(geom, spec, f0, fvec, opt);
}

}  // namespace ikham

#endif  // IKHAM_ELLIPTIC_HPP
