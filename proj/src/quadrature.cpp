#include "semicontrol/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace semicontrol {

namespace {

void check_exponent(double p) {
  if (!(p >= 1.0))  // rejects NaN as well
    throw std::invalid_argument("lp_norm: exponent must satisfy p >= 1 (or be infinity)");
}

double weighted_p_sum(const Eigen::VectorXd& v, const Eigen::VectorXd& w, double p) {
  double s = 0.0;
  for (long i = 0; i < v.size(); ++i) s += w[i] * std::pow(std::abs(v[i]), p);
  return s;
}

}  // namespace

double truncate(double s, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("truncate: k must be positive");
  return std::min(std::max(-k, s), k);
}

double lp_norm(const SpatialField& f, double p) {
  check_exponent(p);
  if (std::isinf(p)) return f.values().cwiseAbs().maxCoeff();
  return std::pow(weighted_p_sum(f.values(), f.grid().node_weight(), p), 1.0 / p);
}

double lp_norm(const SpaceTimeField& f, double p) {
  check_exponent(p);
  if (std::isinf(p)) return f.values().cwiseAbs().maxCoeff();
  const auto& g = f.grid();
  double s = 0.0;
  for (int m = 1; m <= g.nt(); ++m)
    s += g.tau() * weighted_p_sum(f.level(m), g.node_weight(), p);
  return std::pow(s, 1.0 / p);
}

double lp_norm(const BoundaryField& f, double p) {
  check_exponent(p);
  if (std::isinf(p)) return f.values().cwiseAbs().maxCoeff();
  return std::pow(weighted_p_sum(f.values(), f.grid().boundary_weight(), p), 1.0 / p);
}

double bochner_norm(const SpaceTimeField& f, double sigma, double gamma) {
  check_exponent(sigma);
  check_exponent(gamma);
  const auto& g = f.grid();
  double out = 0.0;
  for (int m = 1; m <= g.nt(); ++m) {
    double sm;
    if (std::isinf(gamma)) {
      sm = f.level(m).cwiseAbs().maxCoeff();
    } else {
      sm = std::pow(weighted_p_sum(f.level(m), g.node_weight(), gamma), 1.0 / gamma);
    }
    if (std::isinf(sigma)) {
      out = std::max(out, sm);
    } else {
      out += g.tau() * std::pow(sm, sigma);
    }
  }
  return std::isinf(sigma) ? out : std::pow(out, 1.0 / sigma);
}

double weighted_inner(const SpatialField& a, const SpatialField& b) {
  return a.values().cwiseProduct(b.values()).dot(a.grid().node_weight());
}

double weighted_inner(const SpaceTimeField& a, const SpaceTimeField& b) {
  const auto& g = a.grid();
  double s = 0.0;
  for (int m = 1; m <= g.nt(); ++m)
    s += g.tau() * a.level(m).cwiseProduct(b.level(m)).dot(g.node_weight());
  return s;
}

double weighted_inner(const BoundaryField& a, const BoundaryField& b) {
  return a.values().cwiseProduct(b.values()).dot(a.grid().boundary_weight());
}

double h1_seminorm(const SpatialField& f) {
  const auto& g = f.grid();
  const auto& v = f.values();
  double s = 0.0;
  for (long p = 0; p < g.node_count(); ++p) {
    const auto mi = g.multi_index(p);
    for (int d = 0; d < g.dim(); ++d) {
      if (mi[d] + 1 >= g.nx(d)) continue;
      auto nb = mi;
      nb[d] += 1;
      const double diff = v[g.index(nb)] - v[p];
      // transverse trapezoid weight of the edge, times h_d for the line
      // integral of the squared difference quotient
      double wt = 1.0;
      for (int c = 0; c < g.dim(); ++c) {
        if (c == d) continue;
        wt *= (mi[c] == 0 || mi[c] == g.nx(c) - 1) ? 0.5 * g.h(c) : g.h(c);
      }
      s += wt / g.h(d) * diff * diff;
    }
  }
  return std::sqrt(s);
}

double h1_norm(const SpatialField& f) {
  const double l2 = lp_norm(f, 2.0);
  const double semi = h1_seminorm(f);
  return std::sqrt(l2 * l2 + semi * semi);
}

}  // namespace semicontrol
