#include "semicontrol/optimize.hpp"

#include <cmath>
#include <cstdlib>
#include <future>
#include <thread>

#include "semicontrol/quadrature.hpp"

namespace semicontrol {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Dof-vector view of a tracking problem: control weights, objective, and the
/// pointwise gradient representer phi + alpha u of the weighted inner product.
class ControlModel {
public:
  virtual ~ControlModel() = default;
  virtual long size() const = 0;
  virtual const Eigen::VectorXd& weights() const = 0;
  virtual double alpha() const = 0;
  virtual double objective(const Eigen::VectorXd& u) const = 0;
  virtual double objective_and_gradient(const Eigen::VectorXd& u,
                                        Eigen::VectorXd& grad) const = 0;
};

class ParabolicModel : public ControlModel {
public:
  ParabolicModel(const ParabolicProblem& p, SolveOptions solver) : p_(p), solver_(solver) {
    const GridSpec& g = *p.grid;
    n_ = g.node_count();
    nt_ = g.nt();
    w_.resize(size());
    for (int m = 1; m <= nt_; ++m)
      w_.segment((m - 1) * n_, n_) = g.tau() * g.node_weight();
  }

  long size() const override { return static_cast<long>(nt_) * n_; }
  const Eigen::VectorXd& weights() const override { return w_; }
  double alpha() const override { return p_.alpha; }

  SpaceTimeField field(const Eigen::VectorXd& dofs) const {
    Eigen::VectorXd full = Eigen::VectorXd::Zero((nt_ + 1) * n_);
    full.tail(size()) = dofs;
    return SpaceTimeField(p_.grid, std::move(full));
  }
  static Eigen::VectorXd dofs(const SpaceTimeField& f) {
    const long n = f.grid().node_count();
    return f.values().tail(static_cast<long>(f.grid().nt()) * n);
  }

  double objective(const Eigen::VectorXd& u) const override {
    const SpaceTimeField y = solve_state(p_, field(u), solver_);
    return objective_from(u, y);
  }

  double objective_and_gradient(const Eigen::VectorXd& u, Eigen::VectorXd& grad) const override {
    const SpaceTimeField y = solve_state(p_, field(u), solver_);
    const SpaceTimeField phi = solve_adjoint(p_, y, AdjointRhs::Tracking, solver_);
    grad = dofs(phi) + p_.alpha * u;
    return objective_from(u, y);
  }

  const ParabolicProblem& problem() const { return p_; }
  const SolveOptions& solver() const { return solver_; }

private:
  double objective_from(const Eigen::VectorXd& u, const SpaceTimeField& y) const {
    const SpaceTimeField diff(p_.grid, y.values() - p_.yd.values());
    const double track = lp_norm(diff, 2.0);
    const double unorm2 = u.cwiseAbs2().dot(w_);
    return 0.5 * track * track + 0.5 * p_.alpha * unorm2;
  }

  const ParabolicProblem& p_;
  SolveOptions solver_;
  long n_ = 0;
  int nt_ = 0;
  Eigen::VectorXd w_;
};

class EllipticModel : public ControlModel {
public:
  EllipticModel(const EllipticProblem& p, SolveOptions solver) : p_(p), solver_(solver) {}

  long size() const override { return p_.grid->boundary_count(); }
  const Eigen::VectorXd& weights() const override { return p_.grid->boundary_weight(); }
  double alpha() const override { return p_.alpha; }

  BoundaryField field(const Eigen::VectorXd& dofs) const { return BoundaryField(p_.grid, dofs); }

  double objective(const Eigen::VectorXd& u) const override {
    const SpatialField y = solve_state_elliptic(p_, field(u), solver_);
    return objective_from(u, y);
  }

  double objective_and_gradient(const Eigen::VectorXd& u, Eigen::VectorXd& grad) const override {
    const SpatialField y = solve_state_elliptic(p_, field(u), solver_);
    const SpatialField phi = solve_adjoint_elliptic(p_, y, solver_);
    grad = trace(phi).values() + p_.alpha * u;
    return objective_from(u, y);
  }

  const EllipticProblem& problem() const { return p_; }
  const SolveOptions& solver() const { return solver_; }

private:
  double objective_from(const Eigen::VectorXd& u, const SpatialField& y) const {
    const SpatialField diff(p_.grid, y.values() - p_.yd.values());
    const double track = lp_norm(diff, 2.0);
    const double unorm2 = u.cwiseAbs2().dot(weights());
    return 0.5 * track * track + 0.5 * p_.alpha * unorm2;
  }

  const EllipticProblem& p_;
  SolveOptions solver_;
};

struct CoreOutcome {
  Eigen::VectorXd u;
  std::vector<double> J_history;
  std::vector<double> residual_history;
  int iterations = 0;
  OptStatus status = OptStatus::MaxIter;
  double J = 0.0;
  double residual = 0.0;
  bool M_active = false;
  bool ball_active = false;
  std::string detail;
};

Eigen::VectorXd clamp_box(Eigen::VectorXd v, double M) {
  if (std::isfinite(M)) v = v.cwiseMax(-M).cwiseMin(M);
  return v;
}

double vi_residual_core(const Eigen::VectorXd& u, const Eigen::VectorXd& grad_J,
                        const Eigen::VectorXd& u_ref, double M, double alpha,
                        const Eigen::VectorXd& w) {
  const Eigen::VectorXd phi = grad_J - alpha * u;
  const Eigen::VectorXd target = clamp_box((u_ref - phi) / (1.0 + alpha), M);
  return std::sqrt((u - target).cwiseAbs2().dot(w));
}

// Projected gradient with Armijo backtracking and a Barzilai-Borwein first
// step guess.  With u_ref set the objective carries the proximal term
// 1/2 ||u - u_ref||^2 and convergence is the VI fixed-point residual;
// otherwise it is ||phi + alpha u||.
CoreOutcome minimize_core(const ControlModel& model, Eigen::VectorXd u,
                          const OptimizeOptions& opts, double M,
                          const Eigen::VectorXd* u_ref, double rho) {
  const Eigen::VectorXd& w = model.weights();
  const double alpha = model.alpha();
  const bool prox = (u_ref != nullptr);
  const auto wdot = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return a.cwiseProduct(b).dot(w);
  };

  CoreOutcome out;
  u = clamp_box(std::move(u), M);
  try {
    Eigen::VectorXd grad_J;
    double J = model.objective_and_gradient(u, grad_J);
    double F = J + (prox ? 0.5 * wdot(u - *u_ref, u - *u_ref) : 0.0);
    auto residual_at = [&](const Eigen::VectorXd& uu, const Eigen::VectorXd& gJ) {
      if (prox) return vi_residual_core(uu, gJ, *u_ref, M, alpha, w);
      return std::sqrt(gJ.cwiseAbs2().dot(w));
    };
    double res = residual_at(u, grad_J);
    out.J_history.push_back(J);
    out.residual_history.push_back(res);

    const double fp_damping = opts.fixed_point_damping;
    const bool fixed_point_mode = prox && fp_damping < 1.0;
    double t = prox ? 1.0 / (1.0 + alpha) : 1.0 / alpha;

    int iter = 0;
    while (res > opts.grad_tol && iter < opts.max_iter) {
      ++iter;
      if (fixed_point_mode) {
        const Eigen::VectorXd phi = grad_J - alpha * u;
        const Eigen::VectorXd target = clamp_box((*u_ref - phi) / (1.0 + alpha), M);
        u = (1.0 - fp_damping) * u + fp_damping * target;
        J = model.objective_and_gradient(u, grad_J);
        F = J + 0.5 * wdot(u - *u_ref, u - *u_ref);
      } else {
        Eigen::VectorXd grad_F = grad_J;
        if (prox) grad_F += u - *u_ref;
        double step = t;
        bool accepted = false;
        Eigen::VectorXd trial;
        double J_trial = 0.0, F_trial = 0.0;
        for (int b = 0; b <= opts.armijo.max_backtracks; ++b) {
          trial = clamp_box(u - step * grad_F, M);
          J_trial = model.objective(trial);
          F_trial = J_trial + (prox ? 0.5 * wdot(trial - *u_ref, trial - *u_ref) : 0.0);
          const double slope = wdot(grad_F, trial - u);
          if (F_trial <= F + opts.armijo.c1 * slope) {
            accepted = true;
            break;
          }
          step *= opts.armijo.backtrack;
        }
        if (!accepted) {
          out.detail = "Armijo line search stalled";
          break;
        }
        const Eigen::VectorXd s = trial - u;
        u = std::move(trial);
        Eigen::VectorXd grad_J_new;
        J = model.objective_and_gradient(u, grad_J_new);
        F = F_trial;
        Eigen::VectorXd dg = grad_J_new - grad_J;
        if (prox) dg += s;  // gradient change of the proximal objective
        const double sty = wdot(s, dg);
        if (sty > 0.0) {
          const double bb = wdot(s, s) / sty;
          if (std::isfinite(bb)) t = std::min(std::max(bb, 1e-12), 1e12);
        } else {
          t = std::max(step, 1e-12);
        }
        grad_J = std::move(grad_J_new);
      }
      res = residual_at(u, grad_J);
      out.J_history.push_back(J);
      out.residual_history.push_back(res);
    }

    out.iterations = iter;
    out.J = J;
    out.residual = res;
    out.status = res <= opts.grad_tol ? OptStatus::Converged : OptStatus::MaxIter;
  } catch (const SolverError& e) {
    out.status = OptStatus::Diverged;
    out.detail = e.what();
  }

  if (std::isfinite(M) && u.size() > 0) {
    out.M_active = (u.cwiseAbs().maxCoeff() >= M * (1.0 - 1e-12));
  }
  if (prox && rho > 0.0) {
    const double dist = std::sqrt(wdot(u - *u_ref, u - *u_ref));
    out.ball_active = dist >= rho * (1.0 - 1e-8);
    if (dist > rho)
      out.detail += (out.detail.empty() ? "" : "; ") +
                    std::string("warning: ball constraint ||u - u_ref|| <= rho violated");
  }
  out.u = std::move(u);
  return out;
}

int thread_budget(int max_threads, std::size_t tasks) {
  int n = max_threads;
  if (n <= 0) {
    if (const char* env = std::getenv("SEMICONTROL_THREADS")) n = std::atoi(env);
  }
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  return static_cast<int>(std::min<std::size_t>(n, tasks));
}

void check_schedule(const std::vector<double>& schedule) {
  if (schedule.empty()) throw std::invalid_argument("homotopy: M_schedule must be nonempty");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0.0)) throw std::invalid_argument("homotopy: M values must be positive");
    if (i > 0 && !(schedule[i] > schedule[i - 1]))
      throw std::invalid_argument("homotopy: M_schedule must be strictly increasing");
  }
}

}  // namespace

double objective(const ParabolicProblem& problem, const SpaceTimeField& u,
                 const SolveOptions& opts) {
  ParabolicModel model(problem, opts);
  return model.objective(ParabolicModel::dofs(u));
}

double objective(const EllipticProblem& problem, const BoundaryField& u,
                 const SolveOptions& opts) {
  EllipticModel model(problem, opts);
  return model.objective(u.values());
}

SpaceTimeField gradient(const ParabolicProblem& problem, const SpaceTimeField& u,
                        const SolveOptions& opts) {
  ParabolicModel model(problem, opts);
  Eigen::VectorXd g;
  model.objective_and_gradient(ParabolicModel::dofs(u), g);
  return model.field(g);
}

BoundaryField gradient(const EllipticProblem& problem, const BoundaryField& u,
                       const SolveOptions& opts) {
  EllipticModel model(problem, opts);
  Eigen::VectorXd g;
  model.objective_and_gradient(u.values(), g);
  return model.field(g);
}

namespace {

ParabolicResult package(const ParabolicModel& model, CoreOutcome&& core) {
  ParabolicResult r;
  r.u = model.field(core.u);
  if (core.status != OptStatus::Diverged) {
    r.y = solve_state(model.problem(), r.u, model.solver());
    r.phi = solve_adjoint(model.problem(), r.y, AdjointRhs::Tracking, model.solver());
  }
  r.J_history = std::move(core.J_history);
  r.residual_history = std::move(core.residual_history);
  r.iterations = core.iterations;
  r.status = core.status;
  r.M_active = core.M_active;
  r.ball_active = core.ball_active;
  r.J = core.J;
  r.residual = core.residual;
  r.detail = std::move(core.detail);
  return r;
}

EllipticResult package(const EllipticModel& model, CoreOutcome&& core) {
  EllipticResult r;
  r.u = model.field(core.u);
  if (core.status != OptStatus::Diverged) {
    r.y = solve_state_elliptic(model.problem(), r.u, model.solver());
    r.phi = solve_adjoint_elliptic(model.problem(), r.y, model.solver());
  }
  r.J_history = std::move(core.J_history);
  r.residual_history = std::move(core.residual_history);
  r.iterations = core.iterations;
  r.status = core.status;
  r.M_active = core.M_active;
  r.ball_active = core.ball_active;
  r.J = core.J;
  r.residual = core.residual;
  r.detail = std::move(core.detail);
  return r;
}

template <class Model, class ControlLike>
auto run_truncated(const Model& model, const ControlLike& u_ref_dofs, double M, double rho,
                   const OptimizeOptions& opts) {
  if (!(M > 0.0)) throw std::invalid_argument("solve_truncated: M must be positive");
  Eigen::VectorXd u_ref = u_ref_dofs;
  double rho_eff = rho;
  if (!(rho_eff > 0.0))
    rho_eff = 10.0 * (1.0 + std::sqrt(u_ref.cwiseAbs2().dot(model.weights())));
  CoreOutcome core = minimize_core(model, clamp_box(u_ref, M), opts, M, &u_ref, rho_eff);
  return package(model, std::move(core));
}

template <class Model, class Result, class Problem, class Control>
HomotopyOutcome<Result> run_homotopy(const Problem& problem, const Control& u0,
                                     const OptimizeOptions& opts, bool parallel,
                                     int max_threads) {
  check_schedule(opts.M_schedule);
  HomotopyOutcome<Result> out;
  out.unconstrained = solve_unconstrained(problem, u0, opts);
  const auto& u_bar = out.unconstrained.u;

  const std::size_t count = opts.M_schedule.size();
  out.per_M.resize(count);
  const auto solve_one = [&](std::size_t i) {
    return solve_truncated(problem, u_bar, opts.M_schedule[i], opts.rho, opts);
  };
  if (parallel && count > 1) {
    const int threads = thread_budget(max_threads, count);
    std::size_t next = 0;
    while (next < count) {
      const std::size_t batch = std::min<std::size_t>(threads, count - next);
      std::vector<std::future<Result>> futures;
      futures.reserve(batch);
      for (std::size_t j = 0; j < batch; ++j)
        futures.push_back(std::async(std::launch::async, solve_one, next + j));
      for (std::size_t j = 0; j < batch; ++j) out.per_M[next + j] = futures[j].get();
      next += batch;
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) out.per_M[i] = solve_one(i);
  }

  out.distances.reserve(count);
  for (const auto& r : out.per_M) {
    Eigen::VectorXd diff = r.u.values() - u_bar.values();
    if constexpr (std::is_same_v<Result, ParabolicResult>) {
      out.distances.push_back(lp_norm(SpaceTimeField(problem.grid, std::move(diff)), 2.0));
    } else {
      out.distances.push_back(lp_norm(BoundaryField(problem.grid, std::move(diff)), 2.0));
    }
  }
  return out;
}

}  // namespace

ParabolicResult solve_unconstrained(const ParabolicProblem& problem, const SpaceTimeField& u0,
                                    const OptimizeOptions& opts) {
  ParabolicModel model(problem, opts.solver);
  CoreOutcome core =
      minimize_core(model, ParabolicModel::dofs(u0), opts, kInf, nullptr, 0.0);
  return package(model, std::move(core));
}

EllipticResult solve_unconstrained(const EllipticProblem& problem, const BoundaryField& u0,
                                   const OptimizeOptions& opts) {
  EllipticModel model(problem, opts.solver);
  CoreOutcome core = minimize_core(model, u0.values(), opts, kInf, nullptr, 0.0);
  return package(model, std::move(core));
}

ParabolicResult solve_truncated(const ParabolicProblem& problem, const SpaceTimeField& u_ref,
                                double M, double rho, const OptimizeOptions& opts) {
  ParabolicModel model(problem, opts.solver);
  return run_truncated(model, ParabolicModel::dofs(u_ref), M, rho, opts);
}

EllipticResult solve_truncated(const EllipticProblem& problem, const BoundaryField& u_ref,
                               double M, double rho, const OptimizeOptions& opts) {
  EllipticModel model(problem, opts.solver);
  return run_truncated(model, u_ref.values(), M, rho, opts);
}

HomotopyOutcome<ParabolicResult> homotopy(const ParabolicProblem& problem,
                                          const SpaceTimeField& u0, const OptimizeOptions& opts,
                                          bool parallel, int max_threads) {
  return run_homotopy<ParabolicModel, ParabolicResult>(problem, u0, opts, parallel, max_threads);
}

HomotopyOutcome<EllipticResult> homotopy(const EllipticProblem& problem, const BoundaryField& u0,
                                         const OptimizeOptions& opts, bool parallel,
                                         int max_threads) {
  return run_homotopy<EllipticModel, EllipticResult>(problem, u0, opts, parallel, max_threads);
}

double vi_residual(const SpaceTimeField& u, const SpaceTimeField& phi,
                   const SpaceTimeField& u_ref, double M, double alpha) {
  if (!(M > 0.0)) throw std::invalid_argument("vi_residual: M must be positive");
  const Eigen::VectorXd target =
      clamp_box((u_ref.values() - phi.values()) / (1.0 + alpha), M);
  Eigen::VectorXd diff = u.values() - target;
  diff.head(u.grid().node_count()).setZero();  // level 0 carries no control dof
  return lp_norm(SpaceTimeField(u.grid_ptr(), std::move(diff)), 2.0);
}

double vi_residual(const BoundaryField& u, const BoundaryField& phi, const BoundaryField& u_ref,
                   double M, double alpha) {
  if (!(M > 0.0)) throw std::invalid_argument("vi_residual: M must be positive");
  const Eigen::VectorXd target =
      clamp_box((u_ref.values() - phi.values()) / (1.0 + alpha), M);
  return lp_norm(BoundaryField(u.grid_ptr(), u.values() - target), 2.0);
}

OptimalityReport optimality_report(const ParabolicProblem& problem, const ParabolicResult& result,
                                   const SolveOptions& opts) {
  if (result.status != OptStatus::Converged)
    throw std::invalid_argument("optimality_report: result is not converged");
  const SpaceTimeField y = solve_state(problem, result.u, opts);
  const SpaceTimeField phi = solve_adjoint(problem, y, AdjointRhs::Tracking, opts);

  OptimalityReport rep;
  const long n = problem.grid->node_count();
  Eigen::VectorXd g = phi.values() + problem.alpha * result.u.values();
  g.head(n).setZero();
  rep.grad_norm = lp_norm(SpaceTimeField(problem.grid, g), 2.0);
  rep.u_linf = lp_norm(result.u, kInfExponent);
  rep.y_linf = lp_norm(y, kInfExponent);
  Eigen::VectorXd c = result.u.values() + phi.values() / problem.alpha;
  rep.consistency_linf = c.tail(c.size() - n).cwiseAbs().maxCoeff();
  return rep;
}

OptimalityReport optimality_report(const EllipticProblem& problem, const EllipticResult& result,
                                   const SolveOptions& opts) {
  if (result.status != OptStatus::Converged)
    throw std::invalid_argument("optimality_report: result is not converged");
  const SpatialField y = solve_state_elliptic(problem, result.u, opts);
  const SpatialField phi = solve_adjoint_elliptic(problem, y, opts);
  const BoundaryField phi_trace = trace(phi);

  OptimalityReport rep;
  rep.grad_norm =
      lp_norm(BoundaryField(problem.grid, phi_trace.values() + problem.alpha * result.u.values()),
              2.0);
  rep.u_linf = lp_norm(result.u, kInfExponent);
  rep.y_linf = lp_norm(y, kInfExponent);
  rep.consistency_linf =
      (result.u.values() + phi_trace.values() / problem.alpha).cwiseAbs().maxCoeff();
  return rep;
}

}  // namespace semicontrol
