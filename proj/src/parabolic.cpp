#include "semicontrol/parabolic.hpp"

#include <cmath>

#include "semicontrol/quadrature.hpp"
#include "solver_detail.hpp"

namespace semicontrol {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

SpMat identity(long n) {
  SpMat I(n, n);
  I.setIdentity();
  return I;
}

// f and, when truncation_k > 0, its clamped variant, evaluated on interior
// dofs of the assembled operator.
struct SemilinearTerm {
  const ParabolicProblem& problem;
  const AssembledOperator& op;
  double truncation_k;  // <= 0: plain f

  Eigen::VectorXd value(const Eigen::VectorXd& y) const {
    Eigen::VectorXd out(y.size());
    for (long d = 0; d < y.size(); ++d) {
      const long node = op.dof_to_node[d];
      out[d] = truncation_k > 0.0 ? problem.f.eval_truncated(node, y[d], truncation_k)
                                  : problem.f.eval(node, y[d]);
    }
    return out;
  }
  Eigen::VectorXd derivative(const Eigen::VectorXd& y) const {
    Eigen::VectorXd out(y.size());
    for (long d = 0; d < y.size(); ++d) {
      const long node = op.dof_to_node[d];
      out[d] = truncation_k > 0.0
                   ? problem.f.eval_truncated_derivative(node, y[d], truncation_k)
                   : problem.f.eval_derivative(node, y[d]);
    }
    return out;
  }
};

SpaceTimeField march_forward(const ParabolicProblem& problem, const SpaceTimeField& u,
                             double truncation_k, const SolveOptions& opts) {
  const GridSpec& g = *problem.grid;
  if (!u.grid().same_grid(g)) throw ValidationError("solve_state: control on a different grid");

  const auto op = assemble_operator(problem.coeffs, problem.grid, BoundaryCondition::Dirichlet);
  const long n = op.size();
  const double tau = g.tau();
  const SpMat M = identity(n) + tau * op.nodal;
  const SemilinearTerm f{problem, op, truncation_k};

  Eigen::VectorXd values = Eigen::VectorXd::Zero(g.space_time_count());
  values.head(g.node_count()) = problem.y0.values();

  Eigen::VectorXd y = op.restrict_nodes(problem.y0.values());
  for (int m = 1; m <= g.nt(); ++m) {
    const Eigen::VectorXd rhs = y + tau * op.restrict_nodes(u.level(m));
    const double rhs_norm = std::sqrt(rhs.cwiseAbs2().dot(op.weight));
    detail::NewtonSystem sys{
        [&](const Eigen::VectorXd& z) -> Eigen::VectorXd {
          return M * z + tau * f.value(z) - rhs;
        },
        [&](const Eigen::VectorXd& z) -> SpMat {
          SpMat J = M;
          const Eigen::VectorXd fp = f.derivative(z);
          for (long d = 0; d < n; ++d) J.coeffRef(d, d) += tau * fp[d];
          return J;
        }};
    y = detail::damped_newton(y, sys, op.weight, opts.newton_tol * (1.0 + rhs_norm), opts,
                              "solve_state", m);
    values.segment(static_cast<long>(m) * g.node_count(), g.node_count()) =
        op.extend_to_nodes(y);
  }
  return SpaceTimeField(problem.grid, std::move(values));
}

}  // namespace

ParabolicProblem::ParabolicProblem(GridPtr grid_in, EllipticCoefficients coeffs_in,
                                   Nonlinearity f_in, SpatialField y0_in, SpaceTimeField yd_in,
                                   double alpha_in)
    : grid(std::move(grid_in)),
      coeffs(std::move(coeffs_in)),
      f(std::move(f_in)),
      y0(std::move(y0_in)),
      yd(std::move(yd_in)),
      alpha(alpha_in) {
  if (!grid->has_time()) throw ValidationError("ParabolicProblem: grid has no time axis");
  if (!(alpha > 0.0)) throw ValidationError("ParabolicProblem: alpha must be positive");
  if (!y0.grid().same_grid(*grid) || !yd.grid().same_grid(*grid))
    throw ValidationError("ParabolicProblem: fields on a different grid");
  coeffs.validate(*grid);
}

SpaceTimeField solve_state(const ParabolicProblem& problem, const SpaceTimeField& u,
                           const SolveOptions& opts) {
  return march_forward(problem, u, 0.0, opts);
}

SpaceTimeField solve_state_truncated(const ParabolicProblem& problem, const SpaceTimeField& u,
                                     double k, const SolveOptions& opts) {
  if (!(k > 0.0)) throw std::invalid_argument("solve_state_truncated: k must be positive");
  const double y0_inf = problem.y0.values().cwiseAbs().maxCoeff();
  if (k < y0_inf)
    throw std::invalid_argument("solve_state_truncated: k below ||y0||_inf");
  return march_forward(problem, u, k, opts);
}

SpaceTimeField solve_adjoint(const ParabolicProblem& problem, const SpaceTimeField& y,
                             const SpaceTimeField& rhs, const SolveOptions& opts) {
  const GridSpec& g = *problem.grid;
  if (!y.grid().same_grid(g) || !rhs.grid().same_grid(g))
    throw ValidationError("solve_adjoint: fields on a different grid");

  const auto op = assemble_operator(problem.coeffs, problem.grid, BoundaryCondition::Dirichlet);
  const long n = op.size();
  const double tau = g.tau();
  const SpMat Mt = identity(n) + tau * SpMat(op.nodal.transpose());

  Eigen::VectorXd values = Eigen::VectorXd::Zero(g.space_time_count());
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(n);  // ghost level nt+1
  for (int m = g.nt(); m >= 0; --m) {
    SpMat J = Mt;
    for (long d = 0; d < n; ++d) {
      const long node = op.dof_to_node[d];
      J.coeffRef(d, d) += tau * problem.f.eval_derivative(node, y.at(m, node));
    }
    const Eigen::VectorXd b = phi + tau * op.restrict_nodes(rhs.level(m));
    phi = detail::solve_linear(J, b, opts, "solve_adjoint", m);
    values.segment(static_cast<long>(m) * g.node_count(), g.node_count()) =
        op.extend_to_nodes(phi);
  }
  return SpaceTimeField(problem.grid, std::move(values));
}

SpaceTimeField solve_adjoint(const ParabolicProblem& problem, const SpaceTimeField& y,
                             AdjointRhs mode, const SolveOptions& opts) {
  Eigen::VectorXd r;
  switch (mode) {
    case AdjointRhs::Tracking: r = y.values() - problem.yd.values(); break;
    case AdjointRhs::StateOnly: r = y.values(); break;
    case AdjointRhs::TargetOnly: r = problem.yd.values(); break;
  }
  return solve_adjoint(problem, y, SpaceTimeField(problem.grid, std::move(r)), opts);
}

SpaceTimeField solve_linearized(const ParabolicProblem& problem, const SpaceTimeField& y,
                                const SpaceTimeField& v, const SolveOptions& opts) {
  const GridSpec& g = *problem.grid;
  const auto op = assemble_operator(problem.coeffs, problem.grid, BoundaryCondition::Dirichlet);
  const long n = op.size();
  const double tau = g.tau();
  const SpMat M = identity(n) + tau * op.nodal;

  Eigen::VectorXd values = Eigen::VectorXd::Zero(g.space_time_count());
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  for (int m = 1; m <= g.nt(); ++m) {
    SpMat J = M;
    for (long d = 0; d < n; ++d) {
      const long node = op.dof_to_node[d];
      J.coeffRef(d, d) += tau * problem.f.eval_derivative(node, y.at(m, node));
    }
    w = detail::solve_linear(J, Eigen::VectorXd(w + tau * op.restrict_nodes(v.level(m))), opts,
                             "solve_linearized", m);
    values.segment(static_cast<long>(m) * g.node_count(), g.node_count()) =
        op.extend_to_nodes(w);
  }
  return SpaceTimeField(problem.grid, std::move(values));
}

double energy_ratio(const ParabolicProblem& problem, const SpaceTimeField& u,
                    const SolveOptions& opts) {
  const GridSpec& g = *problem.grid;
  const double denom = lp_norm(u, 2.0) + problem.y0.values().cwiseAbs().maxCoeff();
  if (denom == 0.0)
    throw std::invalid_argument("energy_ratio: ||u|| + ||y0||_inf must be positive");

  const SpaceTimeField y = solve_state(problem, u, opts);

  double linf_l2 = 0.0;
  double l2_h1_sq = 0.0;
  for (int m = 0; m <= g.nt(); ++m) {
    SpatialField ym(problem.grid, y.level(m));
    linf_l2 = std::max(linf_l2, lp_norm(ym, 2.0));
    if (m >= 1) {
      const double semi = h1_seminorm(ym);
      l2_h1_sq += g.tau() * semi * semi;
    }
  }
  Eigen::VectorXd fy(y.size());
  for (int m = 0; m <= g.nt(); ++m)
    for (long p = 0; p < g.node_count(); ++p)
      fy[m * g.node_count() + p] = problem.f.eval(p, y.at(m, p));
  const double f_l2 = lp_norm(SpaceTimeField(problem.grid, std::move(fy)), 2.0);

  return (linf_l2 + std::sqrt(l2_h1_sq) + f_l2) / denom;
}

std::vector<ScalingRow> linf_scaling_check(const ParabolicProblem& problem,
                                           const SpaceTimeField& u,
                                           const std::vector<double>& lambdas, double sigma,
                                           double gamma, const SolveOptions& opts) {
  const int n = problem.grid->dim();
  if (!(sigma >= 2.0) || !(gamma >= 2.0) || 1.0 / sigma + n / (2.0 * gamma) >= 1.0)
    throw std::invalid_argument(
        "linf_scaling_check: exponents must satisfy 1/sigma + n/(2 gamma) < 1 with "
        "sigma, gamma in [2, inf]");

  const double u_norm = bochner_norm(u, sigma, gamma);
  const double y0_inf = problem.y0.values().cwiseAbs().maxCoeff();
  std::vector<ScalingRow> table;
  table.reserve(lambdas.size());
  for (const double lambda : lambdas) {
    const SpaceTimeField y =
        solve_state(problem, SpaceTimeField(problem.grid, lambda * u.values()), opts);
    const double denom = lambda * u_norm + y0_inf;
    if (denom == 0.0)
      throw std::invalid_argument("linf_scaling_check: zero control and initial data");
    table.push_back({lambda, lp_norm(y, kInfExponent) / denom});
  }
  return table;
}

}  // namespace semicontrol
