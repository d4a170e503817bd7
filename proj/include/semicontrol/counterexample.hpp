#pragma once

#include <array>
#include <functional>

namespace semicontrol {

/// Smooth step psi(rho) = S(2-rho) / (S(2-rho) + S(rho-1)) with
/// S(t) = exp(-1/t) for t > 0 and 0 otherwise: psi = 1 on rho <= 1,
/// psi = 0 on rho >= 2, C^infinity in between.
double smooth_step(double rho);
double smooth_step_d1(double rho);
double smooth_step_d2(double rho);

using Point = std::array<double, 3>;

/// Bump phi(x, s) = psi(|x|) psi(|s|): 1 on the cylinder Q_{1,1}, supported
/// in Q_{2,2}.  n is the spatial dimension (2 or 3).
double bump_value(const Point& x, int n, double s);
double bump_dt(const Point& x, int n, double s);
Point bump_grad(const Point& x, int n, double s);
/// Spatial Laplacian sum_i d^2 phi / dx_i^2.
double bump_laplacian(const Point& x, int n, double s);
/// Hessian entry d^2 phi / dx_i dx_j.
double bump_hess(const Point& x, int n, double s, int i, int j);

enum class BumpDerivative { Dt, Dxx };

struct SeriesReport {
  double factor = 0.0;         // sum_{k=1..K} k^-2 2^{k(2-n)}
  double norm_constant = 0.0;  // squared L2(R^{n+1}) norm of the bump derivative
  double value = 0.0;          // factor * norm_constant
};

/// The dyadic counterexample y(x,t) = sum_k k^-1 phi(2^k x, 2^{2k}(t-1)) on
/// Q = B_2(0) x (0,2) and the control it solves the heat equation for.
class BumpSeries {
public:
  BumpSeries(int n, int K);

  int dimension() const { return n_; }
  int truncation() const { return K_; }

  /// sum_{k=1..K} k^-1 phi(2^k x, 2^{2k}(t-1)); only the dyadically active
  /// terms are evaluated.
  double value(const Point& x, double t) const;

  /// u = dy/dt - Laplace y (+ y^3 when with_cubic), evaluated pointwise from
  /// the closed-form bump derivatives.
  double control(const Point& x, double t, bool with_cubic) const;

  /// Partial sum of sum_k k^-2 2^{k(2-n)} ||D phi||^2_{L2(R^{n+1})}; the norm
  /// constant is computed once by adaptive quadrature and cached.
  SeriesReport norm_series(BumpDerivative which) const;

  /// Discrete ||u||_{L2(Q)} by per-shell tensor quadrature on the dyadic
  /// box annuli; nodes_per_axis controls the resolution of each slab.
  double control_l2(bool with_cubic, int nodes_per_axis = 33) const;

  /// Number of terms whose time derivative is nonzero at (x, t); the dyadic
  /// supports make this at most one away from the center.
  int active_dt_terms(const Point& x, double t) const;

private:
  int n_;
  int K_;
};

/// Series factor sum_{k=1..K} k^-2 2^{k(2-n)}.
double series_factor(int K, int n);
/// Cached ||d_t phi||^2 resp. sum_ij ||d_ij phi||^2 over R^{n+1}.
double bump_norm_constant(int n, BumpDerivative which);
/// Cached ||d_t phi - Laplace phi||^2 over R^{n+1} (series reference for the
/// control norm without the cubic term).
double forcing_norm_constant(int n);

/// Adaptive Simpson quadrature to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol);

}  // namespace semicontrol
