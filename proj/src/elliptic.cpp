#include "semicontrol/elliptic.hpp"

#include <cmath>

#include "semicontrol/quadrature.hpp"
#include "solver_detail.hpp"

namespace semicontrol {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

// Load vector of the weak form: W g + T' (w_Gamma u).
Eigen::VectorXd weak_load(const GridSpec& g, const SpatialField& rhs, const BoundaryField* u) {
  Eigen::VectorXd b = g.node_weight().cwiseProduct(rhs.values());
  if (u) {
    for (long k = 0; k < g.boundary_count(); ++k)
      b[g.boundary_nodes()[k]] += g.boundary_weight()[k] * (*u)[k];
  }
  return b;
}

}  // namespace

EllipticProblem::EllipticProblem(GridPtr grid_in, EllipticCoefficients coeffs_in,
                                 Nonlinearity f_in, SpatialField g_in, SpatialField yd_in,
                                 double alpha_in)
    : grid(std::move(grid_in)),
      coeffs(std::move(coeffs_in)),
      f(std::move(f_in)),
      g(std::move(g_in)),
      yd(std::move(yd_in)),
      alpha(alpha_in) {
  if (grid->has_time()) throw ValidationError("EllipticProblem: grid must be spatial-only");
  if (grid->dim() < 2) throw ValidationError("EllipticProblem: dimension must be 2 or 3");
  if (!(alpha > 0.0)) throw ValidationError("EllipticProblem: alpha must be positive");
  if (!f.is_monotone())
    throw ValidationError("EllipticProblem: f must be monotone (lambda_f = 0)");
  if (!g.grid().same_grid(*grid) || !yd.grid().same_grid(*grid))
    throw ValidationError("EllipticProblem: fields on a different grid");
  coeffs.validate(*grid);
  if (coeffs.a0_identically_zero(*grid))
    throw ValidationError("EllipticProblem: a0 must not be identically zero");

  // f(.,0) = 0 holds for the whole catalog; if a future entry relaxes it the
  // substitution g <- g - f(.,0) keeps the weak form unchanged.
  Eigen::VectorXd f0(grid->node_count());
  for (long p = 0; p < grid->node_count(); ++p) f0[p] = f.eval(p, 0.0);
  if (f0.cwiseAbs().maxCoeff() > 0.0)
    g = SpatialField(grid, g.values() - f0);
}

double bilinear_form(const SpatialField& y, const SpatialField& z,
                     const EllipticCoefficients& coeffs, const GridSpec& grid) {
  if (!y.grid().same_grid(grid) || !z.grid().same_grid(grid))
    throw ValidationError("bilinear_form: fields on a different grid");
  GridPtr gp = y.grid_ptr();
  const auto op = assemble_operator(coeffs, gp, BoundaryCondition::Neumann);
  return z.values().dot(op.weighted * y.values());
}

double coercivity_constant(const EllipticCoefficients& coeffs, GridPtr grid) {
  const auto op = assemble_operator(coeffs, grid, BoundaryCondition::Neumann);
  const auto gram =
      assemble_operator(EllipticCoefficients::laplacian(1.0), grid, BoundaryCondition::Neumann);

  // largest eigenvalue of K^{-1} G by power iteration; Lambda_B is its inverse
  Eigen::SparseLU<SpMat> lu;
  lu.compute(op.weighted);
  if (lu.info() != Eigen::Success)
    throw SolverError("coercivity_constant: factorization failed", -1, 0.0);
  Eigen::VectorXd z = Eigen::VectorXd::Ones(op.size());
  z += 1e-3 * Eigen::VectorXd::LinSpaced(op.size(), 0.0, 1.0);  // break symmetry
  double lambda = 0.0;
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd w = lu.solve(gram.weighted * z);
    w /= w.norm();
    const double next = w.dot(op.weighted * w) / w.dot(gram.weighted * w);
    const bool done = std::abs(next - lambda) <= 1e-10 * std::abs(next);
    lambda = next;
    z = std::move(w);
    if (done && it > 3) break;
  }
  return lambda;
}

SpatialField solve_state_elliptic(const EllipticProblem& problem, const BoundaryField& u,
                                  const SolveOptions& opts) {
  const GridSpec& g = *problem.grid;
  if (!u.grid().same_grid(g))
    throw ValidationError("solve_state_elliptic: control on a different grid");

  const auto op = assemble_operator(problem.coeffs, problem.grid, BoundaryCondition::Neumann);
  const Eigen::VectorXd b = weak_load(g, problem.g, &u);
  const double b_norm = std::sqrt(b.cwiseAbs2().dot(g.node_weight().cwiseInverse()));

  detail::NewtonSystem sys{
      [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
        Eigen::VectorXd fy(y.size());
        for (long p = 0; p < y.size(); ++p) fy[p] = problem.f.eval(p, y[p]);
        return op.weighted * y + g.node_weight().cwiseProduct(fy) - b;
      },
      [&](const Eigen::VectorXd& y) -> SpMat {
        SpMat J = op.weighted;
        for (long p = 0; p < y.size(); ++p)
          J.coeffRef(p, p) += g.node_weight()[p] * problem.f.eval_derivative(p, y[p]);
        return J;
      }};
  // weighted residual: the weak-form residual is already weight-scaled, so
  // measure it in the W^{-1} norm to keep the tolerance grid-consistent
  Eigen::VectorXd y = detail::damped_newton(Eigen::VectorXd::Zero(g.node_count()), sys,
                                            g.node_weight().cwiseInverse(),
                                            opts.newton_tol * (1.0 + b_norm), opts,
                                            "solve_state_elliptic");
  return SpatialField(problem.grid, std::move(y));
}

SpatialField solve_adjoint_elliptic(const EllipticProblem& problem, const SpatialField& y,
                                    const SpatialField& rhs, const SolveOptions& opts) {
  const GridSpec& g = *problem.grid;
  if (!y.grid().same_grid(g) || !rhs.grid().same_grid(g))
    throw ValidationError("solve_adjoint_elliptic: fields on a different grid");
  const auto op = assemble_operator(problem.coeffs, problem.grid, BoundaryCondition::Neumann);
  SpMat J = SpMat(op.weighted.transpose());
  for (long p = 0; p < g.node_count(); ++p)
    J.coeffRef(p, p) += g.node_weight()[p] * problem.f.eval_derivative(p, y[p]);
  const Eigen::VectorXd b = weak_load(g, rhs, nullptr);
  return SpatialField(problem.grid, detail::solve_linear(J, b, opts, "solve_adjoint_elliptic"));
}

SpatialField solve_adjoint_elliptic(const EllipticProblem& problem, const SpatialField& y,
                                    const SolveOptions& opts) {
  return solve_adjoint_elliptic(problem, y,
                                SpatialField(problem.grid, y.values() - problem.yd.values()),
                                opts);
}

SpatialField solve_linearized_elliptic(const EllipticProblem& problem, const SpatialField& y,
                                       const BoundaryField& v, const SolveOptions& opts) {
  const GridSpec& g = *problem.grid;
  const auto op = assemble_operator(problem.coeffs, problem.grid, BoundaryCondition::Neumann);
  SpMat J = op.weighted;
  for (long p = 0; p < g.node_count(); ++p)
    J.coeffRef(p, p) += g.node_weight()[p] * problem.f.eval_derivative(p, y[p]);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(g.node_count());
  for (long k = 0; k < g.boundary_count(); ++k)
    b[g.boundary_nodes()[k]] += g.boundary_weight()[k] * v[k];
  return SpatialField(problem.grid,
                      detail::solve_linear(J, b, opts, "solve_linearized_elliptic"));
}

BoundaryField trace(const SpatialField& field) {
  const GridSpec& g = field.grid();
  Eigen::VectorXd v(g.boundary_count());
  for (long k = 0; k < g.boundary_count(); ++k) v[k] = field[g.boundary_nodes()[k]];
  return BoundaryField(field.grid_ptr(), std::move(v));
}

SpatialField solve_state_dirichlet_demo(const EllipticCoefficients& coeffs, GridPtr grid,
                                        const Nonlinearity& f, const SpatialField& u,
                                        const SolveOptions& opts) {
  const auto op = assemble_operator(coeffs, grid, BoundaryCondition::Dirichlet);
  const Eigen::VectorXd b = op.restrict_nodes(u.values());
  detail::NewtonSystem sys{
      [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
        Eigen::VectorXd fy(y.size());
        for (long d = 0; d < y.size(); ++d) fy[d] = f.eval(op.dof_to_node[d], y[d]);
        return op.nodal * y + fy - b;
      },
      [&](const Eigen::VectorXd& y) -> SpMat {
        SpMat J = op.nodal;
        for (long d = 0; d < y.size(); ++d)
          J.coeffRef(d, d) += f.eval_derivative(op.dof_to_node[d], y[d]);
        return J;
      }};
  const double b_norm = std::sqrt(b.cwiseAbs2().dot(op.weight));
  Eigen::VectorXd y =
      detail::damped_newton(Eigen::VectorXd::Zero(op.size()), sys, op.weight,
                            opts.newton_tol * (1.0 + b_norm), opts, "solve_state_dirichlet");
  return SpatialField(grid, op.extend_to_nodes(y));
}

}  // namespace semicontrol
