#include "semicontrol/counterexample.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace semicontrol {

namespace {

double S(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
double S1(double t) { return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }
double S2(double t) {
  if (t <= 0.0) return 0.0;
  const double t2 = t * t;
  return std::exp(-1.0 / t) * (1.0 - 2.0 * t) / (t2 * t2);
}

double radius(const Point& x, int n) {
  double r2 = 0.0;
  for (int i = 0; i < n; ++i) r2 += x[i] * x[i];
  return std::sqrt(r2);
}

double sphere_area(int n) {
  if (n == 2) return 2.0 * M_PI;
  if (n == 3) return 4.0 * M_PI;
  throw std::invalid_argument("counterexample: dimension must be 2 or 3");
}

double simpson_rec(const std::function<double(double)>& f, double a, double m, double b,
                   double fa, double fm, double fb, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, m, b, fa, fm, fb, whole, tol, 48);
}

double smooth_step(double rho) {
  if (rho <= 1.0) return 1.0;
  if (rho >= 2.0) return 0.0;
  const double N = S(2.0 - rho);
  return N / (N + S(rho - 1.0));
}

double smooth_step_d1(double rho) {
  if (rho <= 1.0 || rho >= 2.0) return 0.0;
  const double N = S(2.0 - rho), M = S(rho - 1.0);
  const double Np = -S1(2.0 - rho), Mp = S1(rho - 1.0);
  const double D = N + M;
  return (Np * M - N * Mp) / (D * D);
}

double smooth_step_d2(double rho) {
  if (rho <= 1.0 || rho >= 2.0) return 0.0;
  const double N = S(2.0 - rho), M = S(rho - 1.0);
  const double Np = -S1(2.0 - rho), Mp = S1(rho - 1.0);
  const double Npp = S2(2.0 - rho), Mpp = S2(rho - 1.0);
  const double D = N + M;
  return (Npp * M - N * Mpp) / (D * D) -
         2.0 * (Np * M - N * Mp) * (Np + Mp) / (D * D * D);
}

double bump_value(const Point& x, int n, double s) {
  return smooth_step(radius(x, n)) * smooth_step(std::abs(s));
}

double bump_dt(const Point& x, int n, double s) {
  const double d = smooth_step_d1(std::abs(s));
  if (d == 0.0) return 0.0;
  return smooth_step(radius(x, n)) * d * (s >= 0.0 ? 1.0 : -1.0);
}

Point bump_grad(const Point& x, int n, double s) {
  Point g{0.0, 0.0, 0.0};
  const double r = radius(x, n);
  const double d = smooth_step_d1(r);
  if (d == 0.0) return g;
  const double scale = d * smooth_step(std::abs(s)) / r;
  for (int i = 0; i < n; ++i) g[i] = scale * x[i];
  return g;
}

double bump_laplacian(const Point& x, int n, double s) {
  const double r = radius(x, n);
  const double d1 = smooth_step_d1(r), d2 = smooth_step_d2(r);
  if (d1 == 0.0 && d2 == 0.0) return 0.0;
  return smooth_step(std::abs(s)) * (d2 + (n - 1) * d1 / r);
}

double bump_hess(const Point& x, int n, double s, int i, int j) {
  const double r = radius(x, n);
  const double d1 = smooth_step_d1(r), d2 = smooth_step_d2(r);
  if (d1 == 0.0 && d2 == 0.0) return 0.0;
  const double ei = x[i] / r, ej = x[j] / r;
  const double delta = (i == j) ? 1.0 : 0.0;
  return smooth_step(std::abs(s)) * (d2 * ei * ej + d1 * (delta - ei * ej) / r);
}

BumpSeries::BumpSeries(int n, int K) : n_(n), K_(K) {
  if (n != 2 && n != 3)
    throw std::invalid_argument("BumpSeries: dimension must be 2 or 3");
  if (K < 1) throw std::invalid_argument("BumpSeries: K must be >= 1");
}

double BumpSeries::value(const Point& x, double t) const {
  double sum = 0.0;
  for (int k = 1; k <= K_; ++k) {
    Point xs{0.0, 0.0, 0.0};
    for (int i = 0; i < n_; ++i) xs[i] = std::ldexp(x[i], k);
    const double ss = std::ldexp(t - 1.0, 2 * k);
    if (radius(xs, n_) >= 2.0 || std::abs(ss) >= 2.0) break;  // later terms vanish too
    sum += bump_value(xs, n_, ss) / k;
  }
  return sum;
}

double BumpSeries::control(const Point& x, double t, bool with_cubic) const {
  double sum = 0.0;
  for (int k = 1; k <= K_; ++k) {
    Point xs{0.0, 0.0, 0.0};
    for (int i = 0; i < n_; ++i) xs[i] = std::ldexp(x[i], k);
    const double ss = std::ldexp(t - 1.0, 2 * k);
    if (radius(xs, n_) >= 2.0 || std::abs(ss) >= 2.0) break;
    // both d_t and the Laplacian pick up the parabolic factor 2^{2k}
    const double scale = std::ldexp(1.0, 2 * k) / k;
    sum += scale * (bump_dt(xs, n_, ss) - bump_laplacian(xs, n_, ss));
  }
  if (with_cubic) {
    const double y = value(x, t);
    sum += y * y * y;
  }
  return sum;
}

int BumpSeries::active_dt_terms(const Point& x, double t) const {
  int count = 0;
  for (int k = 1; k <= K_; ++k) {
    Point xs{0.0, 0.0, 0.0};
    for (int i = 0; i < n_; ++i) xs[i] = std::ldexp(x[i], k);
    const double ss = std::ldexp(t - 1.0, 2 * k);
    if (radius(xs, n_) >= 2.0 || std::abs(ss) >= 2.0) break;
    if (bump_dt(xs, n_, ss) != 0.0) ++count;
  }
  return count;
}

double series_factor(int K, int n) {
  double sum = 0.0;
  for (int k = 1; k <= K; ++k)
    sum += std::ldexp(1.0, k * (2 - n)) / (static_cast<double>(k) * k);
  return sum;
}

namespace {

constexpr double kQuadTol = 1e-12;

double psi_sq_radial(int n) {
  return sphere_area(n) * adaptive_simpson(
                              [n](double rho) {
                                const double p = smooth_step(rho);
                                return p * p * std::pow(rho, n - 1);
                              },
                              0.0, 2.0, kQuadTol);
}

double psi_sq_line() {
  return 2.0 * adaptive_simpson(
                   [](double s) {
                     const double p = smooth_step(s);
                     return p * p;
                   },
                   0.0, 2.0, kQuadTol);
}

double dpsi_sq_line() {
  return 2.0 * adaptive_simpson(
                   [](double s) {
                     const double d = smooth_step_d1(s);
                     return d * d;
                   },
                   0.0, 2.0, kQuadTol);
}

double hess_frobenius_radial(int n) {
  return sphere_area(n) *
         adaptive_simpson(
             [n](double rho) {
               const double d1 = smooth_step_d1(rho), d2 = smooth_step_d2(rho);
               if (rho == 0.0) return 0.0;
               return (d2 * d2 + (n - 1) * d1 * d1 / (rho * rho)) * std::pow(rho, n - 1);
             },
             0.0, 2.0, kQuadTol);
}

double laplacian_sq_radial(int n) {
  return sphere_area(n) *
         adaptive_simpson(
             [n](double rho) {
               if (rho == 0.0) return 0.0;
               const double lap = smooth_step_d2(rho) + (n - 1) * smooth_step_d1(rho) / rho;
               return lap * lap * std::pow(rho, n - 1);
             },
             0.0, 2.0, kQuadTol);
}

}  // namespace

double bump_norm_constant(int n, BumpDerivative which) {
  if (n != 2 && n != 3)
    throw std::invalid_argument("bump_norm_constant: dimension must be 2 or 3");
  // ||d_t phi||^2 = [w_n int psi(|x|)^2 dx] * [int psi'(|s|)^2 ds]
  // sum_ij ||d_ij phi||^2 = [int psi(|s|)^2 ds] * [w_n int (psi''^2 + (n-1) psi'^2 / r^2) r^{n-1} dr]
  static const double dt2 = psi_sq_radial(2) * dpsi_sq_line();
  static const double dt3 = psi_sq_radial(3) * dpsi_sq_line();
  static const double dxx2 = psi_sq_line() * hess_frobenius_radial(2);
  static const double dxx3 = psi_sq_line() * hess_frobenius_radial(3);
  if (which == BumpDerivative::Dt) return n == 2 ? dt2 : dt3;
  return n == 2 ? dxx2 : dxx3;
}

double forcing_norm_constant(int n) {
  if (n != 2 && n != 3)
    throw std::invalid_argument("forcing_norm_constant: dimension must be 2 or 3");
  // the cross term int phi_t * Lap phi vanishes: the integrand is odd in s
  static const double f2 = psi_sq_radial(2) * dpsi_sq_line() + psi_sq_line() * laplacian_sq_radial(2);
  static const double f3 = psi_sq_radial(3) * dpsi_sq_line() + psi_sq_line() * laplacian_sq_radial(3);
  return n == 2 ? f2 : f3;
}

SeriesReport BumpSeries::norm_series(BumpDerivative which) const {
  SeriesReport rep;
  rep.factor = series_factor(K_, n_);
  rep.norm_constant = bump_norm_constant(n_, which);
  rep.value = rep.factor * rep.norm_constant;
  return rep;
}

namespace {

struct Box {
  std::array<double, 4> lo;  // n space axes then time offset t - 1
  std::array<double, 4> hi;
};

// Tensor trapezoid of u(x, t)^2 over an axis-aligned box in (x, t-1).
double box_quadrature(const BumpSeries& series, const Box& box, int n, bool with_cubic,
                      int nodes) {
  const int axes = n + 1;
  std::array<double, 4> step{};
  for (int a = 0; a < axes; ++a) step[a] = (box.hi[a] - box.lo[a]) / (nodes - 1);

  long total = 1;
  for (int a = 0; a < axes; ++a) total *= nodes;

  double sum = 0.0;
  std::array<int, 4> idx{};
  for (long flat = 0; flat < total; ++flat) {
    long rem = flat;
    double w = 1.0;
    Point x{0.0, 0.0, 0.0};
    double ts = 0.0;
    for (int a = axes - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rem % nodes);
      rem /= nodes;
      const bool edge = (idx[a] == 0 || idx[a] == nodes - 1);
      w *= edge ? 0.5 * step[a] : step[a];
      const double coord = box.lo[a] + idx[a] * step[a];
      if (a < n) {
        x[a] = coord;
      } else {
        ts = coord;
      }
    }
    const double u = series.control(x, 1.0 + ts, with_cubic);
    sum += w * u * u;
  }
  return sum;
}

}  // namespace

double BumpSeries::control_l2(bool with_cubic, int nodes_per_axis) const {
  if (nodes_per_axis < 3)
    throw std::invalid_argument("control_l2: nodes_per_axis must be >= 3");
  const int axes = n_ + 1;
  double total = 0.0;

  // dyadic box annuli m = 1..K, peeled into 2(n+1) slabs each
  for (int m = 1; m <= K_; ++m) {
    std::array<double, 4> a{}, b{};
    for (int i = 0; i < n_; ++i) {
      a[i] = std::ldexp(1.0, 1 - m);   // outer half-width in space
      b[i] = std::ldexp(1.0, -m);      // inner half-width
    }
    a[n_] = std::ldexp(1.0, 1 - 2 * m);
    b[n_] = std::ldexp(1.0, -2 * m);

    for (int j = 0; j < axes; ++j) {
      for (int side = 0; side < 2; ++side) {
        Box box;
        for (int i = 0; i < axes; ++i) {
          if (i < j) {
            box.lo[i] = -a[i];
            box.hi[i] = a[i];
          } else if (i > j) {
            box.lo[i] = -b[i];
            box.hi[i] = b[i];
          } else if (side == 0) {
            box.lo[i] = b[i];
            box.hi[i] = a[i];
          } else {
            box.lo[i] = -a[i];
            box.hi[i] = -b[i];
          }
        }
        total += box_quadrature(*this, box, n_, with_cubic, nodes_per_axis);
      }
    }
  }

  // central core box
  Box core;
  for (int i = 0; i < n_; ++i) {
    core.lo[i] = -std::ldexp(1.0, -K_);
    core.hi[i] = std::ldexp(1.0, -K_);
  }
  core.lo[n_] = -std::ldexp(1.0, -2 * K_);
  core.hi[n_] = std::ldexp(1.0, -2 * K_);
  total += box_quadrature(*this, core, n_, with_cubic, nodes_per_axis);

  return std::sqrt(total);
}

}  // namespace semicontrol
