#ifndef IKHAM_GMRES_HPP
#define IKHAM_GMRES_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace ikham {

struct SolveReport {
  int iterations = 0;
  double final_residual = 0.0;  ///< relative, discrete L2
  bool converged = false;
};

struct GmresOptions {
  double tol = 1e-10;      ///< stop once ||b - A x|| <= tol * reference_norm
  int max_iter = 500;
  int restart = 60;
  double reference_norm = -1.0;  ///< defaults to ||b|| when negative
};

/// Restarted GMRES with right preconditioning, so the monitored residual is
/// the true (unpreconditioned) residual. `apply` and `precond` map
/// Eigen::VectorXd -> Eigen::VectorXd. `x` holds the initial guess on entry.
template <class Apply, class Precond>
SolveReport gmres(Apply&& apply, Precond&& precond, const Eigen::VectorXd& rhs, Eigen::VectorXd& x,
                  const GmresOptions& opt) {
  using Eigen::VectorXd;
  SolveReport report;
  const double bnorm = rhs.norm();
  const double ref = opt.reference_norm >= 0.0 ? opt.reference_norm : bnorm;
  if (bnorm == 0.0) {
    x.setZero();
    report.converged = true;
    return report;
  }
  const double target = opt.tol * ref;
  const int m = std::max(1, opt.restart);

  VectorXd r = rhs - apply(x);
  double beta = r.norm();
  report.final_residual = beta / bnorm;
  if (beta <= target) {
    report.converged = true;
    return report;
  }

  std::vector<VectorXd> basis;
  std::vector<VectorXd> precond_basis;
  Eigen::MatrixXd hess(m + 1, m);
  VectorXd cs(m), sn(m), g(m + 1);

  while (report.iterations < opt.max_iter) {
    basis.assign(1, r / beta);
    precond_basis.clear();
    hess.setZero();
    g.setZero();
    g[0] = beta;
    int k = 0;
    for (; k < m && report.iterations < opt.max_iter; ++k) {
      precond_basis.push_back(precond(basis[k]));
      VectorXd w = apply(precond_basis[k]);
      // modified Gram-Schmidt, two passes
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i <= k; ++i) {
          const double h = basis[i].dot(w);
          hess(i, k) += h;
          w -= h * basis[i];
        }
      }
      hess(k + 1, k) = w.norm();
      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * hess(i, k) + sn[i] * hess(i + 1, k);
        hess(i + 1, k) = -sn[i] * hess(i, k) + cs[i] * hess(i + 1, k);
        hess(i, k) = t;
      }
      const double denom = std::hypot(hess(k, k), hess(k + 1, k));
      cs[k] = denom == 0.0 ? 1.0 : hess(k, k) / denom;
      sn[k] = denom == 0.0 ? 0.0 : hess(k + 1, k) / denom;
      hess(k, k) = denom;
      hess(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      ++report.iterations;
      const double wnorm = w.norm();
      if (std::abs(g[k + 1]) <= target || wnorm == 0.0) {
        ++k;
        break;
      }
      basis.push_back(w / wnorm);
    }
    const VectorXd y = hess.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    for (int i = 0; i < k; ++i) x += y[i] * precond_basis[i];
    r = rhs - apply(x);
    beta = r.norm();
    report.final_residual = beta / bnorm;
    if (beta <= target) {
      report.converged = true;
      return report;
    }
  }
  return report;
}

}  // namespace ikham

#endif  // IKHAM_GMRES_HPP
