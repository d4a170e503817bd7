#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "semicontrol/coefficients.hpp"
#include "semicontrol/grid.hpp"

namespace semicontrol {

enum class BoundaryCondition { Dirichlet, Neumann };

/// Second-order centered finite-difference discretization of
///   A y = -sum_ij d_j(a_ij d_i y) + a0 y.
///
/// Dirichlet: dofs are the interior nodes, boundary rows/columns eliminated
/// (homogeneous data); `nodal` is the classical stencil matrix and every dof
/// carries the uniform weight prod_i h_i.
///
/// Neumann: dofs are all nodes; fluxes are eliminated with second-order ghost
/// nodes, which makes weighted = diag(weight) * nodal the symmetric bilinear
/// form B(y,z) including the lumped a0 mass.  Boundary data enters the load
/// as boundary_weight * u at each boundary node.
struct AssembledOperator {
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  GridPtr grid;
  Eigen::SparseMatrix<double> nodal;     // action approximates A y on dofs
  Eigen::SparseMatrix<double> weighted;  // diag(weight) * nodal, symmetric for symmetric a
  Eigen::VectorXd weight;                // quadrature weight per dof
  std::vector<long> dof_to_node;
  std::vector<long> node_to_dof;         // -1 for eliminated nodes

  long size() const { return nodal.rows(); }

  /// Restrict a full nodal vector to the dof set.
  Eigen::VectorXd restrict_nodes(const Eigen::VectorXd& full) const;
  /// Scatter a dof vector back to all nodes (eliminated nodes get 0).
  Eigen::VectorXd extend_to_nodes(const Eigen::VectorXd& dofs) const;
};

AssembledOperator assemble_operator(const EllipticCoefficients& coeffs, GridPtr grid,
                                    BoundaryCondition bc);

}  // namespace semicontrol
