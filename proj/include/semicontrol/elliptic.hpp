#pragma once

#include "semicontrol/coefficients.hpp"
#include "semicontrol/fields.hpp"
#include "semicontrol/nonlinearity.hpp"
#include "semicontrol/operators.hpp"
#include "semicontrol/parabolic.hpp"  // SolveOptions

namespace semicontrol {

/// Neumann boundary-control problem data: state equation
///   A y + f(x, y) = g in Omega,  d_{nu_A} y = u on Gamma,
/// with a0 not identically zero and monotone f (lambda_f = 0).
struct EllipticProblem {
  EllipticProblem(GridPtr grid, EllipticCoefficients coeffs, Nonlinearity f, SpatialField g,
                  SpatialField yd, double alpha);

  GridPtr grid;  // spatial-only
  EllipticCoefficients coeffs;
  Nonlinearity f;
  SpatialField g;
  SpatialField yd;
  double alpha;
};

/// B(y,z) = int_Omega (sum a_ij d_i y d_j z + a0 y z) dx in the discrete
/// edge/lumped form; symmetric for symmetric a.
double bilinear_form(const SpatialField& y, const SpatialField& z,
                     const EllipticCoefficients& coeffs, const GridSpec& grid);

/// Coercivity constant Lambda_B with B(y,y) >= Lambda_B ||y||_{H1,discrete}^2,
/// computed as the smallest generalized eigenvalue of (B, H1-Gram) by inverse
/// power iteration.
double coercivity_constant(const EllipticCoefficients& coeffs, GridPtr grid);

/// Monotone Newton solve of the discrete weak form; Neumann data enters the
/// load through the boundary trapezoid weights.
SpatialField solve_state_elliptic(const EllipticProblem& problem, const BoundaryField& u,
                                  const SolveOptions& opts = {});

/// Adjoint solve (A* + f'(y)) phi = y - yd with homogeneous Neumann data.
SpatialField solve_adjoint_elliptic(const EllipticProblem& problem, const SpatialField& y,
                                    const SolveOptions& opts = {});
SpatialField solve_adjoint_elliptic(const EllipticProblem& problem, const SpatialField& y,
                                    const SpatialField& rhs, const SolveOptions& opts = {});

/// Linearized control-to-state map at y applied to boundary perturbation v.
SpatialField solve_linearized_elliptic(const EllipticProblem& problem, const SpatialField& y,
                                       const BoundaryField& v, const SolveOptions& opts = {});

/// Restriction to the boundary nodes in the grid's canonical (lexicographic)
/// boundary order.
BoundaryField trace(const SpatialField& field);

/// Demo wrapper for the distributed-control Dirichlet variant: solves
/// A y + f(y) = u with homogeneous Dirichlet data by reusing the parabolic
/// operator assembly.
SpatialField solve_state_dirichlet_demo(const EllipticCoefficients& coeffs, GridPtr grid,
                                        const Nonlinearity& f, const SpatialField& u,
                                        const SolveOptions& opts = {});

}  // namespace semicontrol
