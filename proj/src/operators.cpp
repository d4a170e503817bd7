#include "semicontrol/operators.hpp"

#include <array>

#include "semicontrol/errors.hpp"

namespace semicontrol {

namespace {

using Triplet = Eigen::Triplet<double>;

double edge_diffusion(const EllipticCoefficients& c, int axis, long p, long q) {
  if (c.is_isotropic()) return 0.5 * (c.iso_at(p) + c.iso_at(q));
  return c.matrix()(axis, axis);
}

// Transverse trapezoid weight of an edge along `axis` (the product of the
// per-axis weights of the edge's fixed coordinates).
double transverse_weight(const GridSpec& g, const std::array<int, 3>& mi, int axis) {
  double w = 1.0;
  for (int c = 0; c < g.dim(); ++c) {
    if (c == axis) continue;
    w *= (mi[c] == 0 || mi[c] == g.nx(c) - 1) ? 0.5 * g.h(c) : g.h(c);
  }
  return w;
}

AssembledOperator assemble_dirichlet(const EllipticCoefficients& coeffs, GridPtr grid) {
  const GridSpec& g = *grid;
  AssembledOperator op;
  op.bc = BoundaryCondition::Dirichlet;
  op.grid = grid;
  op.dof_to_node = g.interior_nodes();
  op.node_to_dof.assign(g.node_count(), -1);
  for (long d = 0; d < static_cast<long>(op.dof_to_node.size()); ++d)
    op.node_to_dof[op.dof_to_node[d]] = d;

  const long n = static_cast<long>(op.dof_to_node.size());
  std::vector<Triplet> trips;
  trips.reserve(7 * n);

  for (long row = 0; row < n; ++row) {
    const long p = op.dof_to_node[row];
    const auto mi = g.multi_index(p);
    double diag = coeffs.a0_at(p);
    for (int d = 0; d < g.dim(); ++d) {
      const double inv_h2 = 1.0 / (g.h(d) * g.h(d));
      for (int sgn : {-1, +1}) {
        auto nb = mi;
        nb[d] += sgn;
        const long q = g.index(nb);
        const double a = edge_diffusion(coeffs, d, p, q);
        diag += a * inv_h2;
        const long col = op.node_to_dof[q];
        if (col >= 0) trips.emplace_back(row, col, -a * inv_h2);
      }
    }
    // constant symmetric cross terms: -2 a_de d_d d_e y, centered 4-point
    if (!coeffs.is_isotropic()) {
      for (int d = 0; d < g.dim(); ++d) {
        for (int e = d + 1; e < g.dim(); ++e) {
          const double a_de = coeffs.matrix()(d, e);
          if (a_de == 0.0) continue;
          const double c = a_de / (2.0 * g.h(d) * g.h(e));
          for (int sd : {-1, +1}) {
            for (int se : {-1, +1}) {
              auto nb = mi;
              nb[d] += sd;
              nb[e] += se;
              const long col = op.node_to_dof[g.index(nb)];
              if (col >= 0) trips.emplace_back(row, col, -c * sd * se);
            }
          }
        }
      }
    }
    trips.emplace_back(row, row, diag);
  }

  op.nodal.resize(n, n);
  op.nodal.setFromTriplets(trips.begin(), trips.end());
  op.weight = Eigen::VectorXd::Constant(n, g.cell_volume());
  op.weighted = g.cell_volume() * op.nodal;
  return op;
}

AssembledOperator assemble_neumann(const EllipticCoefficients& coeffs, GridPtr grid) {
  const GridSpec& g = *grid;
  if (!coeffs.is_diagonal())
    throw ValidationError(
        "assemble_operator: Neumann ghost elimination supports diagonal or isotropic a only");

  AssembledOperator op;
  op.bc = BoundaryCondition::Neumann;
  op.grid = grid;
  const long n = g.node_count();
  op.dof_to_node.resize(n);
  op.node_to_dof.resize(n);
  for (long p = 0; p < n; ++p) op.dof_to_node[p] = op.node_to_dof[p] = p;

  std::vector<Triplet> trips;
  trips.reserve(7 * n);
  // edge form: sum over grid edges of a_edge * wt / h * (y_p - y_q)(z_p - z_q)
  for (long p = 0; p < n; ++p) {
    const auto mi = g.multi_index(p);
    for (int d = 0; d < g.dim(); ++d) {
      if (mi[d] + 1 >= g.nx(d)) continue;
      auto nb = mi;
      nb[d] += 1;
      const long q = g.index(nb);
      const double c = edge_diffusion(coeffs, d, p, q) * transverse_weight(g, mi, d) / g.h(d);
      trips.emplace_back(p, p, c);
      trips.emplace_back(q, q, c);
      trips.emplace_back(p, q, -c);
      trips.emplace_back(q, p, -c);
    }
    trips.emplace_back(p, p, g.node_weight()[p] * coeffs.a0_at(p));
  }

  op.weighted.resize(n, n);
  op.weighted.setFromTriplets(trips.begin(), trips.end());
  op.weight = g.node_weight();
  op.nodal = op.weight.cwiseInverse().asDiagonal() * op.weighted;
  return op;
}

}  // namespace

Eigen::VectorXd AssembledOperator::restrict_nodes(const Eigen::VectorXd& full) const {
  Eigen::VectorXd out(size());
  for (long d = 0; d < size(); ++d) out[d] = full[dof_to_node[d]];
  return out;
}

Eigen::VectorXd AssembledOperator::extend_to_nodes(const Eigen::VectorXd& dofs) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(grid->node_count());
  for (long d = 0; d < size(); ++d) out[dof_to_node[d]] = dofs[d];
  return out;
}

AssembledOperator assemble_operator(const EllipticCoefficients& coeffs, GridPtr grid,
                                    BoundaryCondition bc) {
  coeffs.validate(*grid);
  return bc == BoundaryCondition::Dirichlet ? assemble_dirichlet(coeffs, grid)
                                            : assemble_neumann(coeffs, grid);
}

}  // namespace semicontrol
