#pragma once

// Shared linear-solve and damped-Newton helpers for the state/adjoint solvers.

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <functional>
#include <string>

#include "semicontrol/errors.hpp"
#include "semicontrol/parabolic.hpp"

namespace semicontrol::detail {

inline Eigen::VectorXd solve_linear(const Eigen::SparseMatrix<double>& A,
                                    const Eigen::VectorXd& b, const SolveOptions& opts,
                                    const std::string& context, int step = -1) {
  Eigen::VectorXd x;
  if (opts.direct_solver) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success)
      throw SolverError(context + ": sparse LU factorization failed", step, 0.0);
    x = lu.solve(b);
    // one refinement pass if roundoff left the residual above tolerance
    double res = (A * x - b).norm();
    const double scale = 1.0 + b.norm();
    if (res > opts.linear_tol * scale) {
      x += lu.solve(b - A * x);
      res = (A * x - b).norm();
      if (res > opts.linear_tol * scale)
        throw SolverError(context + ": linear residual above linear_tol", step, res);
    }
  } else {
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>> it;
    it.setTolerance(opts.linear_tol);
    it.setMaxIterations(10 * A.rows());
    it.compute(A);
    x = it.solve(b);
    if (it.info() != Eigen::Success)
      throw SolverError(context + ": BiCGSTAB did not converge", step, it.error());
  }
  return x;
}

struct NewtonSystem {
  // residual F(y); returns the residual vector
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> residual;
  // Jacobian dF/dy at y
  std::function<Eigen::SparseMatrix<double>(const Eigen::VectorXd&)> jacobian;
};

/// Damped Newton with step halving.  Convergence on the weighted L2 residual
/// ||F||_w <= tol_abs, where ||v||_w = sqrt(sum w_i v_i^2).
inline Eigen::VectorXd damped_newton(Eigen::VectorXd y, const NewtonSystem& sys,
                                     const Eigen::VectorXd& norm_weight, double tol_abs,
                                     const SolveOptions& opts, const std::string& context,
                                     int step = -1) {
  const auto wnorm = [&](const Eigen::VectorXd& v) {
    return std::sqrt(v.cwiseAbs2().dot(norm_weight));
  };
  Eigen::VectorXd F = sys.residual(y);
  double res = wnorm(F);
  for (int it = 0; it < opts.max_newton; ++it) {
    if (res <= tol_abs) return y;
    const Eigen::VectorXd delta = solve_linear(sys.jacobian(y), -F, opts, context, step);
    double s = 1.0;
    bool accepted = false;
    for (int half = 0; half <= opts.max_halvings; ++half) {
      Eigen::VectorXd trial = y + s * delta;
      Eigen::VectorXd Ft = sys.residual(trial);
      const double rt = wnorm(Ft);
      if (rt <= (1.0 - 1e-4 * s) * res || rt <= tol_abs) {
        y = std::move(trial);
        F = std::move(Ft);
        res = rt;
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    if (!accepted)
      throw SolverError(context + ": Newton line search stalled", step, res);
  }
  if (res <= tol_abs) return y;
  throw SolverError(context + ": Newton did not converge within max_newton", step, res);
}

}  // namespace semicontrol::detail
