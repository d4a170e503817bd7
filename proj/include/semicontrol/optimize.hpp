#pragma once

#include <string>
#include <vector>

#include "semicontrol/elliptic.hpp"
#include "semicontrol/parabolic.hpp"

namespace semicontrol {

struct ArmijoOptions {
  double c1 = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 40;
};

struct OptimizeOptions {
  double grad_tol = 1e-8;  // weighted L2 norm of phi + alpha u (resp. VI residual)
  int max_iter = 2000;
  ArmijoOptions armijo;
  std::vector<double> M_schedule;  // strictly increasing, for homotopy()
  double rho = -1.0;               // <= 0: auto 10 * (1 + ||u_ref||)
  // 1.0: projected gradient with Armijo (default).  In (0,1): solve_truncated
  // instead iterates the damped fixed point
  //   u <- (1-d) u + d P_M((u_ref - phi(u)) / (1 + alpha)).
  double fixed_point_damping = 1.0;
  SolveOptions solver;
};

enum class OptStatus { Converged, MaxIter, Diverged };

template <class ControlField, class StateField>
struct OptimizationResult {
  ControlField u;
  StateField y;
  StateField phi;
  std::vector<double> J_history;
  std::vector<double> residual_history;
  int iterations = 0;
  OptStatus status = OptStatus::MaxIter;
  bool M_active = false;     // some node sits at +-M
  bool ball_active = false;  // ||u - u_ref|| reached rho (within tolerance)
  double J = 0.0;
  double residual = 0.0;
  std::string detail;
};

using ParabolicResult = OptimizationResult<SpaceTimeField, SpaceTimeField>;
using EllipticResult = OptimizationResult<BoundaryField, SpatialField>;

/// J(u) = 1/2 ||y_u - yd||^2 + alpha/2 ||u||^2 in the matching discrete norms.
double objective(const ParabolicProblem& problem, const SpaceTimeField& u,
                 const SolveOptions& opts = {});
double objective(const EllipticProblem& problem, const BoundaryField& u,
                 const SolveOptions& opts = {});

/// Exact discrete gradient phi + alpha u (parabolic; level 0 zeroed) resp.
/// trace(phi) + alpha u (elliptic).
SpaceTimeField gradient(const ParabolicProblem& problem, const SpaceTimeField& u,
                        const SolveOptions& opts = {});
BoundaryField gradient(const EllipticProblem& problem, const BoundaryField& u,
                       const SolveOptions& opts = {});

/// Armijo gradient descent (Barzilai-Borwein step guess) until
/// ||phi + alpha u|| <= grad_tol.
ParabolicResult solve_unconstrained(const ParabolicProblem& problem, const SpaceTimeField& u0,
                                    const OptimizeOptions& opts = {});
EllipticResult solve_unconstrained(const EllipticProblem& problem, const BoundaryField& u0,
                                   const OptimizeOptions& opts = {});

/// Projected gradient for min J(u) + 1/2 ||u - u_ref||^2 over the box
/// |u| <= M, started at P_M(u_ref).  Convergence is measured by the fixed
/// point identity u = P_M((u_ref - phi) / (1 + alpha)).  The ball
/// ||u - u_ref|| <= rho is monitored a posteriori, not enforced.
ParabolicResult solve_truncated(const ParabolicProblem& problem, const SpaceTimeField& u_ref,
                                double M, double rho, const OptimizeOptions& opts = {});
EllipticResult solve_truncated(const EllipticProblem& problem, const BoundaryField& u_ref,
                               double M, double rho, const OptimizeOptions& opts = {});

template <class Result>
struct HomotopyOutcome {
  Result unconstrained;           // the reference minimizer u_bar
  std::vector<Result> per_M;      // solutions of (P_M) along the schedule
  std::vector<double> distances;  // d_M = ||u_M - u_bar|| (weighted control norm)
};

/// Solves the unconstrained problem, then (P_M) for every M in the schedule
/// with u_ref = u_bar.  Schedule entries may run concurrently; results are
/// bitwise identical to the sequential run.
HomotopyOutcome<ParabolicResult> homotopy(const ParabolicProblem& problem,
                                          const SpaceTimeField& u0, const OptimizeOptions& opts,
                                          bool parallel = false, int max_threads = 0);
HomotopyOutcome<EllipticResult> homotopy(const EllipticProblem& problem, const BoundaryField& u0,
                                         const OptimizeOptions& opts, bool parallel = false,
                                         int max_threads = 0);

/// || u - P_M((u_ref - phi) / (1 + alpha)) || in the weighted control norm;
/// pass M = infinity for the proximal stationarity residual.
double vi_residual(const SpaceTimeField& u, const SpaceTimeField& phi,
                   const SpaceTimeField& u_ref, double M, double alpha);
double vi_residual(const BoundaryField& u, const BoundaryField& phi, const BoundaryField& u_ref,
                   double M, double alpha);

struct OptimalityReport {
  double grad_norm = 0.0;         // ||phi + alpha u|| recomputed from scratch
  double u_linf = 0.0;
  double y_linf = 0.0;
  double consistency_linf = 0.0;  // max |u + phi/alpha| over control dofs
};

/// Recomputes state and adjoint from the stored control; rejects
/// non-converged results.
OptimalityReport optimality_report(const ParabolicProblem& problem, const ParabolicResult& result,
                                   const SolveOptions& opts = {});
OptimalityReport optimality_report(const EllipticProblem& problem, const EllipticResult& result,
                                   const SolveOptions& opts = {});

}  // namespace semicontrol
