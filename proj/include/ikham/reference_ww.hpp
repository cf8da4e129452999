#ifndef IKHAM_REFERENCE_WW_HPP
#define IKHAM_REFERENCE_WW_HPP

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "ikham/field.hpp"

namespace ikham {

/// Chebyshev-Gauss-Lobatto nodes x_k = cos(pi k / n) on [-1, 1] with the
/// collocation derivative matrix and Clenshaw-Curtis weights.
struct Chebyshev {
  Eigen::VectorXd nodes;
  Eigen::MatrixXd diff;
  Eigen::VectorXd weights;

  explicit Chebyshev(int n) : nodes(n + 1), diff(n + 1, n + 1), weights(n + 1) {
    const double pi = std::numbers::pi;
    for (int k = 0; k <= n; ++k) nodes[k] = std::cos(pi * k / n);
    auto c = [n](int k) { return ((k == 0 || k == n) ? 2.0 : 1.0) * ((k % 2) ? -1.0 : 1.0); };
    diff.setZero();
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        if (i != j) diff(i, j) = c(i) / c(j) / (nodes[i] - nodes[j]);
      }
      diff(i, i) = -diff.row(i).sum();
    }
    // Clenshaw-Curtis
    weights.setZero();
    const int inner = n - 1;
    Eigen::VectorXd v = Eigen::VectorXd::Ones(inner);
    const auto theta = [&](int k) { return pi * k / n; };
    if (n % 2 == 0) {
      weights[0] = weights[n] = 1.0 / (n * n - 1.0);
      for (int k = 1; k < n / 2; ++k) {
        for (int i = 1; i <= inner; ++i) v[i - 1] -= 2.0 * std::cos(2.0 * k * theta(i)) / (4.0 * k * k - 1.0);
      }
      for (int i = 1; i <= inner; ++i) v[i - 1] -= std::cos(n * theta(i)) / (n * n - 1.0);
    } else {
      weights[0] = weights[n] = 1.0 / (n * n);
      for (int k = 1; k <= (n - 1) / 2; ++k) {
        for (int i = 1; i <= inner; ++i) v[i - 1] -= 2.0 * std::cos(2.0 * k * theta(i)) / (4.0 * k * k - 1.0);
      }
    }
    for (int i = 1; i <= inner; ++i) weights[i] = 2.0 * v[i - 1] / n;
  }
};

/// Terrain-following grid z = -1 + b(x) + s H(x), s in [0, 1]. Level 0 is
/// the surface (s = 1), level Mz the bottom (s = 0).
struct SigmaGrid {
  Grid grid;
  int levels;                ///< Mz
  Eigen::VectorXd s;         ///< s_k, k = 0..Mz
  Eigen::MatrixXd ds;        ///< d/ds collocation matrix
  Eigen::VectorXd weights;   ///< quadrature weights on [0, 1]

  SigmaGrid(const Grid& g, int mz) : grid(g), levels(mz) {
    if (mz < 2) throw InvalidArgument("vertical resolution Mz must be >= 2");
    const Chebyshev cheb(mz);
    s = (cheb.nodes.array() + 1.0) / 2.0;
    ds = 2.0 * cheb.diff;
    weights = 0.5 * cheb.weights;
  }
};

/// Flat-bottom, flat-surface Dirichlet-to-Neumann multiplier tanh(delta k) k / delta.
inline Field dtn_flat(const Field& phi, double delta) {
  return apply_multiplier(phi, [delta](double k) { return k == 0.0 ? 0.0 : k * std::tanh(delta * k) / delta; });
}

/// Velocity potential on a SigmaGrid. values(k, j) is Phi at level k, column j.
struct LaplaceSolution {
  SigmaGrid sigma;
  Eigen::MatrixXd values;
  Field depth;
  Field depth_x;
  Field bottom_x;
  double delta;
  double residual;  ///< relative residual of the collocation system

  /// Physical z of node (k, j).
  double z(int k, int j, const Field& bottom) const { return -1.0 + bottom[j] + sigma.s[k] * depth[j]; }

  /// 1/2 iint (Phi_x^2 + delta^{-2} Phi_z^2) dx dz, with Jacobian H per column.
  double kinetic_energy() const {
    const int m = sigma.grid.size();
    const int nz = sigma.levels;
    Eigen::MatrixXd psi_x(nz + 1, m);
    for (int k = 0; k <= nz; ++k) {
      psi_x.row(k) = deriv(Field(sigma.grid, values.row(k).transpose().array())).values().matrix().transpose();
    }
    const Eigen::MatrixXd psi_s = sigma.ds * values;
    const double inv_d2 = 1.0 / (delta * delta);
    double total = 0.0;
    for (int j = 0; j < m; ++j) {
      const double h = depth[j];
      double col = 0.0;
      for (int k = 0; k <= nz; ++k) {
        const double sx = -(bottom_x[j] + sigma.s[k] * depth_x[j]) / h;
        const double phix = psi_x(k, j) + sx * psi_s(k, j);
        const double phiz = psi_s(k, j) / h;
        col += sigma.weights[k] * (phix * phix + inv_d2 * phiz * phiz);
      }
      total += h * col;
    }
    return 0.5 * sigma.grid.spacing() * total;
  }
};

namespace detail {

/// Dense Fourier differentiation matrix consistent with deriv().
inline Eigen::MatrixXd fourier_diff_matrix(const Grid& grid) {
  const int m = grid.size();
  Eigen::MatrixXd d(m, m);
  Field e(grid);
  for (int l = 0; l < m; ++l) {
    e.values().setZero();
    e[l] = 1.0;
    d.col(l) = deriv(e).values().matrix();
  }
  return d;
}

}  // namespace detail

/// Solves Phi_xx + delta^{-2} Phi_zz = 0 between z = -1 + b and z = eta with
/// Phi = phi on the surface and b_x Phi_x - delta^{-2} Phi_z = 0 on the bottom,
/// using Fourier x Chebyshev collocation in sigma coordinates and a dense LU.
inline LaplaceSolution solve_laplace_sigma(const Field& eta, const Field& b, const Field& phi, double delta, int mz,
                                           double depth_floor = 1e-3, double residual_tol = 1e-9) {
  eta.check_same(b);
  eta.check_same(phi);
  if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
  const Grid& grid = eta.grid();
  const Field depth = Field::constant(grid, 1.0) + eta - b;
  if (depth.min() < depth_floor) throw InvalidGeometry(depth.min(), depth_floor);

  SigmaGrid sigma(grid, mz);
  const int m = grid.size();
  const int n = m * (mz + 1);
  const Field hx = deriv(depth);
  const Field hxx = deriv(hx);
  const Field bx = deriv(b);
  const Field bxx = deriv(bx);
  const Eigen::MatrixXd dx = detail::fourier_diff_matrix(grid);
  const Eigen::MatrixXd dxx = dx * dx;
  const Eigen::MatrixXd& ds = sigma.ds;
  const Eigen::MatrixXd dss = ds * ds;
  const double d2 = delta * delta;
  auto idx = [m](int k, int j) { return k * m + j; };

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);

  for (int j = 0; j < m; ++j) {
    a(idx(0, j), idx(0, j)) = 1.0;
    rhs[idx(0, j)] = phi[j];
  }
  // Rows are multiplied by delta^2 H^2 (interior) or delta^2 H (bottom).
  for (int k = 1; k <= mz; ++k) {
    const double s = sigma.s[k];
    for (int j = 0; j < m; ++j) {
      const double h = depth[j];
      const int row = idx(k, j);
      if (k < mz) {
        const double sx = -(bx[j] + s * hx[j]) / h;
        const double sxx = -(bxx[j] + s * hxx[j]) / h + 2.0 * (bx[j] + s * hx[j]) * hx[j] / (h * h);
        const double scale = d2 * h * h;
        for (int l = 0; l < m; ++l) a(row, idx(k, l)) += scale * dxx(j, l);
        for (int q = 0; q <= mz; ++q) {
          const double cross = scale * 2.0 * sx * ds(k, q);
          if (cross != 0.0) {
            for (int l = 0; l < m; ++l) a(row, idx(q, l)) += cross * dx(j, l);
          }
          a(row, idx(q, j)) += scale * sxx * ds(k, q) + (scale * sx * sx + 1.0) * dss(k, q);
        }
      } else {
        for (int l = 0; l < m; ++l) a(row, idx(k, l)) += d2 * h * bx[j] * dx(j, l);
        for (int q = 0; q <= mz; ++q) a(row, idx(q, j)) -= (d2 * bx[j] * bx[j] + 1.0) * ds(k, q);
      }
    }
  }

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const Eigen::VectorXd x = lu.solve(rhs);
  const double rnorm = rhs.norm();
  const double residual = rnorm == 0.0 ? 0.0 : (a * x - rhs).norm() / rnorm;
  if (!(residual <= residual_tol)) {
    throw SolverError("sigma-coordinate Laplace solve residual " + std::to_string(residual));
  }
  LaplaceSolution sol{sigma, Eigen::MatrixXd(mz + 1, m), depth, hx, bx, delta, residual};
  for (int k = 0; k <= mz; ++k) sol.values.row(k) = x.segment(k * m, m).transpose();
  return sol;
}

/// Water-wave Hamiltonian: kinetic energy of the harmonic extension of phi plus (g/2) int eta^2.
inline double hamiltonian_ww(const Field& eta, const Field& b, const Field& phi, double delta, int mz,
                             double gravity = 1.0, double depth_floor = 1e-3) {
  return solve_laplace_sigma(eta, b, phi, delta, mz, depth_floor).kinetic_energy() +
         0.5 * gravity * inner(eta, eta);
}

}  // namespace ikham

#endif  // IKHAM_REFERENCE_WW_HPP
