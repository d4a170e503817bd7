#pragma once

#include <vector>

#include "semicontrol/coefficients.hpp"
#include "semicontrol/fields.hpp"
#include "semicontrol/nonlinearity.hpp"
#include "semicontrol/operators.hpp"

namespace semicontrol {

struct SolveOptions {
  double newton_tol = 1e-10;   // relative nonlinear residual per time step
  int max_newton = 50;
  double linear_tol = 1e-12;   // inner linear solves
  bool direct_solver = true;   // sparse LU; false -> BiCGSTAB
  int max_halvings = 30;       // damped Newton step halvings
};

/// Distributed-control problem data: state equation
///   dy/dt + A y + f(y) = u in Q,  y = 0 on Sigma,  y(.,0) = y0,
/// with tracking target yd and Tikhonov weight alpha.
struct ParabolicProblem {
  ParabolicProblem(GridPtr grid, EllipticCoefficients coeffs, Nonlinearity f,
                   SpatialField y0, SpaceTimeField yd, double alpha);

  GridPtr grid;
  EllipticCoefficients coeffs;
  Nonlinearity f;
  SpatialField y0;
  SpaceTimeField yd;
  double alpha;
};

/// Implicit Euler with damped Newton per step.  Control values live on time
/// levels 1..nt (right-endpoint rule); level 0 of u is ignored.
SpaceTimeField solve_state(const ParabolicProblem& problem, const SpaceTimeField& u,
                           const SolveOptions& opts = {});

/// Same scheme with f replaced by f(P_k(.)).  Requires k >= ||y0||_inf.
SpaceTimeField solve_state_truncated(const ParabolicProblem& problem, const SpaceTimeField& u,
                                     double k, const SolveOptions& opts = {});

enum class AdjointRhs { Tracking, StateOnly, TargetOnly };

/// Backward implicit Euler for
///   -dphi/dt + A* phi + f'(y) phi = rhs,  phi = 0 on Sigma,  phi(T) = 0,
/// with the terminal condition imposed one ghost level past nt so that the
/// recursion is the exact transpose of the linearized forward step.  Level 0
/// extends the recursion once more for output purposes; gradients only read
/// levels 1..nt.
SpaceTimeField solve_adjoint(const ParabolicProblem& problem, const SpaceTimeField& y,
                             AdjointRhs mode, const SolveOptions& opts = {});
SpaceTimeField solve_adjoint(const ParabolicProblem& problem, const SpaceTimeField& y,
                             const SpaceTimeField& rhs, const SolveOptions& opts = {});

/// Linearization of the forward map at state y applied to a control
/// perturbation v (w(0) = 0).
SpaceTimeField solve_linearized(const ParabolicProblem& problem, const SpaceTimeField& y,
                                const SpaceTimeField& v, const SolveOptions& opts = {});

/// (||y||_{Linf(L2)} + ||y||_{L2(H1)} + ||f(y)||_{L2(Q)}) /
/// (||u||_{L2(Q)} + ||y0||_inf); rejects a zero denominator.
double energy_ratio(const ParabolicProblem& problem, const SpaceTimeField& u,
                    const SolveOptions& opts = {});

struct ScalingRow {
  double lambda;
  double ratio;  // ||y_{lambda u}||_inf / (lambda ||u||_{sigma,gamma} + ||y0||_inf)
};

/// Scaling table for the Linf estimate; requires 1/sigma + n/(2 gamma) < 1
/// with sigma, gamma in [2, inf].
std::vector<ScalingRow> linf_scaling_check(const ParabolicProblem& problem,
                                           const SpaceTimeField& u,
                                           const std::vector<double>& lambdas, double sigma,
                                           double gamma, const SolveOptions& opts = {});

}  // namespace semicontrol
