#pragma once

#include <limits>

#include "semicontrol/fields.hpp"

namespace semicontrol {

/// Exponent sentinel for the nodal maximum norm.
inline constexpr double kInfExponent = std::numeric_limits<double>::infinity();

/// Pointwise clamp P_k(s) = min{max{-k, s}, k}.  Requires k > 0.
double truncate(double s, double k);

/// Discrete L^p norm: composite trapezoid in space, right-endpoint rectangle
/// rule over time levels 1..nt.  p = kInfExponent returns max |value| over
/// every stored entry.
double lp_norm(const SpatialField& f, double p);
double lp_norm(const SpaceTimeField& f, double p);
/// Boundary-measure L^p norm with face-accumulated trapezoid weights.
double lp_norm(const BoundaryField& f, double p);

/// || t -> ||f(.,t)||_{L^gamma} ||_{L^sigma(0,T)} by nested quadrature.
/// Time reductions run over levels 1..nt (right-endpoint convention);
/// sigma or gamma may be kInfExponent.
double bochner_norm(const SpaceTimeField& f, double sigma, double gamma);

/// Weighted inner products matching lp_norm(.,2)^2.
double weighted_inner(const SpatialField& a, const SpatialField& b);
double weighted_inner(const SpaceTimeField& a, const SpaceTimeField& b);
double weighted_inner(const BoundaryField& a, const BoundaryField& b);

/// Forward-difference H^1 seminorm with transverse trapezoid weights, the
/// discrete stand-in for ||grad y||_{L^2(Omega)}.
double h1_seminorm(const SpatialField& f);
/// sqrt(lp_norm(f,2)^2 + h1_seminorm(f)^2).
double h1_norm(const SpatialField& f);

}  // namespace semicontrol
