#include "semicontrol/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "semicontrol/counterexample.hpp"
#include "semicontrol/elliptic.hpp"
#include "semicontrol/errors.hpp"
#include "semicontrol/exponents.hpp"
#include "semicontrol/optimize.hpp"
#include "semicontrol/parabolic.hpp"
#include "semicontrol/quadrature.hpp"

namespace semicontrol {

namespace {

// ---------------------------------------------------------------- strings

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12e", v);
  return buf;
}

// ------------------------------------------------------------ expressions

struct Expression {
  enum class Kind { Zero, One, Const, SinSin, Gauss, Coord } kind = Kind::Zero;
  double param = 0.0;
  int axis = 0;
};

Expression parse_expression(const std::string& text, const std::string& key) {
  const auto parts = split(text, ':');
  Expression e;
  if (parts.empty()) throw ConfigError("empty expression for key '" + key + "'");
  const std::string& id = parts[0];
  const auto need_param = [&](Expression::Kind k) {
    if (parts.size() != 2) throw ConfigError("expression '" + text + "' for key '" + key +
                                             "' needs exactly one parameter");
    e.kind = k;
    try {
      e.param = std::stod(parts[1]);
    } catch (const std::exception&) {
      throw ConfigError("bad parameter in expression '" + text + "' for key '" + key + "'");
    }
  };
  if (id == "zero") e.kind = Expression::Kind::Zero;
  else if (id == "one") e.kind = Expression::Kind::One;
  else if (id == "sinsin") e.kind = Expression::Kind::SinSin;
  else if (id == "const") need_param(Expression::Kind::Const);
  else if (id == "gauss") need_param(Expression::Kind::Gauss);
  else if (id == "coord") {
    need_param(Expression::Kind::Coord);
    e.axis = static_cast<int>(e.param);
  } else {
    throw ConfigError("unknown expression '" + text + "' for key '" + key + "'");
  }
  return e;
}

double eval_expression(const Expression& e, const std::array<double, 3>& x, const GridSpec& g) {
  switch (e.kind) {
    case Expression::Kind::Zero: return 0.0;
    case Expression::Kind::One: return 1.0;
    case Expression::Kind::Const: return e.param;
    case Expression::Kind::SinSin: {
      double v = 1.0;
      for (int d = 0; d < g.dim(); ++d) v *= std::sin(M_PI * x[d] / g.length(d));
      return v;
    }
    case Expression::Kind::Gauss: {
      double r2 = 0.0;
      for (int d = 0; d < g.dim(); ++d) {
        const double c = x[d] - 0.5 * g.length(d);
        r2 += c * c;
      }
      return std::exp(-e.param * r2);
    }
    case Expression::Kind::Coord: {
      if (e.axis < 1 || e.axis > g.dim())
        throw ConfigError("coord expression axis out of range");
      return x[e.axis - 1];
    }
  }
  return 0.0;
}

SpatialField spatial_expression(const GridPtr& grid, const std::string& text,
                                const std::string& key) {
  const Expression e = parse_expression(text, key);
  return SpatialField::sample(grid,
                              [&](const std::array<double, 3>& x) { return eval_expression(e, x, *grid); });
}

// Controls live on time levels 1..nt; level 0 stays zero.
SpaceTimeField control_expression(const GridPtr& grid, const std::string& text,
                                  const std::string& key, unsigned seed) {
  const long n = grid->node_count();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(grid->space_time_count());
  if (text == "random") {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (long i = n; i < v.size(); ++i) v[i] = dist(rng);
  } else {
    const Expression e = parse_expression(text, key);
    for (int m = 1; m <= grid->nt(); ++m)
      for (long p = 0; p < n; ++p)
        v[m * n + p] = eval_expression(e, grid->coords(p), *grid);
  }
  return SpaceTimeField(grid, std::move(v));
}

BoundaryField boundary_expression(const GridPtr& grid, const std::string& text,
                                  const std::string& key, unsigned seed) {
  if (text == "random") {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd v(grid->boundary_count());
    for (long i = 0; i < v.size(); ++i) v[i] = dist(rng);
    return BoundaryField(grid, std::move(v));
  }
  const Expression e = parse_expression(text, key);
  return BoundaryField::sample(grid,
                               [&](const std::array<double, 3>& x) { return eval_expression(e, x, *grid); });
}

// ------------------------------------------------------------- schema

const std::map<std::string, std::vector<std::string>>& allowed_keys() {
  static const std::map<std::string, std::vector<std::string>> schema = {
      {"grid", {"n", "nx", "L", "nt", "T"}},
      {"problem", {"kind", "alpha", "nonlinearity", "weight", "y0", "yd", "g", "u"}},
      {"solver", {"newton_tol", "max_newton", "linear_tol", "direct"}},
      {"optimize", {"grad_tol", "max_iter", "M_schedule", "rho", "u0", "fixed_point_damping"}},
      {"counterexample", {"n", "K", "with_cubic", "nodes", "m_max"}},
      {"exponents", {"n", "r"}},
      {"run", {"command", "seed", "output_dir", "parallel"}},
  };
  return schema;
}

// ------------------------------------------------------------- builders

GridPtr build_grid(const ExperimentConfig& cfg, bool needs_time) {
  const int n = cfg.get_int("grid", "n", 0);
  if (n < 1 || n > 3) throw ConfigError("[grid] n must be 1, 2, or 3");
  auto nx = cfg.get_ints("grid", "nx");
  auto L = cfg.get_doubles("grid", "L");
  if (nx.size() == 1) nx.assign(n, nx[0]);
  if (L.size() == 1) L.assign(n, L[0]);
  if (static_cast<int>(nx.size()) != n) throw ConfigError("[grid] nx needs n entries");
  if (static_cast<int>(L.size()) != n) throw ConfigError("[grid] L needs n entries");
  try {
    if (needs_time) {
      const int nt = cfg.get_int("grid", "nt", 0);
      const double T = cfg.get_double("grid", "T", 0.0);
      if (nt < 1) throw ConfigError("[grid] nt must be >= 1 for parabolic problems");
      return GridSpec::space_time(nx, L, nt, T);
    }
    return GridSpec::spatial(nx, L);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[grid] ") + e.what());
  }
}

Nonlinearity build_nonlinearity(const ExperimentConfig& cfg, const GridPtr& grid) {
  const std::string text = cfg.get("problem", "nonlinearity", "zero");
  const auto parts = split(text, ':');
  const auto param = [&](std::size_t i) {
    if (parts.size() <= i)
      throw ConfigError("[problem] nonlinearity '" + text + "' is missing a parameter");
    try {
      return std::stod(parts[i]);
    } catch (const std::exception&) {
      throw ConfigError("[problem] bad nonlinearity parameter in '" + text + "'");
    }
  };
  Nonlinearity f = Nonlinearity::zero();
  try {
    if (parts[0] == "zero") f = Nonlinearity::zero();
    else if (parts[0] == "cubic") f = Nonlinearity::cubic(param(1));
    else if (parts[0] == "cubic_minus_linear")
      f = Nonlinearity::cubic_minus_linear(param(1), param(2));
    else if (parts[0] == "expm1") f = Nonlinearity::expm1();
    else throw ConfigError("[problem] unknown nonlinearity '" + text + "'");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[problem] nonlinearity: ") + e.what());
  }
  const std::string weight = cfg.get("problem", "weight", "");
  if (!weight.empty() && weight != "one")
    f = f.with_weight(spatial_expression(grid, weight, "weight"));
  return f;
}

SolveOptions build_solver(const ExperimentConfig& cfg) {
  SolveOptions opts;
  opts.newton_tol = cfg.get_double("solver", "newton_tol", opts.newton_tol);
  opts.max_newton = cfg.get_int("solver", "max_newton", opts.max_newton);
  opts.linear_tol = cfg.get_double("solver", "linear_tol", opts.linear_tol);
  opts.direct_solver = cfg.get_bool("solver", "direct", opts.direct_solver);
  if (!(opts.newton_tol > 0.0) || !(opts.linear_tol > 0.0))
    throw ConfigError("[solver] tolerances must be positive");
  if (opts.max_newton < 1) throw ConfigError("[solver] max_newton must be positive");
  return opts;
}

OptimizeOptions build_optimize(const ExperimentConfig& cfg) {
  OptimizeOptions opts;
  opts.solver = build_solver(cfg);
  opts.grad_tol = cfg.get_double("optimize", "grad_tol", opts.grad_tol);
  opts.max_iter = cfg.get_int("optimize", "max_iter", opts.max_iter);
  opts.rho = cfg.get_double("optimize", "rho", opts.rho);
  opts.fixed_point_damping =
      cfg.get_double("optimize", "fixed_point_damping", opts.fixed_point_damping);
  if (cfg.has("optimize", "M_schedule")) opts.M_schedule = cfg.get_doubles("optimize", "M_schedule");
  if (!(opts.grad_tol > 0.0)) throw ConfigError("[optimize] grad_tol must be positive");
  if (opts.max_iter < 1) throw ConfigError("[optimize] max_iter must be positive");
  if (!(opts.fixed_point_damping > 0.0) || opts.fixed_point_damping > 1.0)
    throw ConfigError("[optimize] fixed_point_damping must lie in (0,1]");
  return opts;
}

ParabolicProblem build_parabolic(const ExperimentConfig& cfg, const GridPtr& grid) {
  const double alpha = cfg.get_double("problem", "alpha", 1.0);
  auto f = build_nonlinearity(cfg, grid);
  auto y0 = spatial_expression(grid, cfg.get("problem", "y0", "zero"), "y0");
  const Expression yd_expr = parse_expression(cfg.get("problem", "yd", "zero"), "yd");
  auto yd = SpaceTimeField::sample(grid, [&](const std::array<double, 3>& x, double) {
    return eval_expression(yd_expr, x, *grid);
  });
  return ParabolicProblem(grid, EllipticCoefficients::laplacian(0.0), std::move(f),
                          std::move(y0), std::move(yd), alpha);
}

EllipticProblem build_elliptic(const ExperimentConfig& cfg, const GridPtr& grid) {
  const double alpha = cfg.get_double("problem", "alpha", 1.0);
  auto f = build_nonlinearity(cfg, grid);
  auto g = spatial_expression(grid, cfg.get("problem", "g", "zero"), "g");
  auto yd = spatial_expression(grid, cfg.get("problem", "yd", "zero"), "yd");
  return EllipticProblem(grid, EllipticCoefficients::laplacian(1.0), std::move(f), std::move(g),
                         std::move(yd), alpha);
}

// --------------------------------------------------------------- report

struct Report {
  double J = std::nan("");
  double grad_norm = std::nan("");
  int iters = 0;
  double u_linf = std::nan("");
  double y_linf = std::nan("");
  bool M_active = false;
  bool ball_active = false;
  std::string status = "ok";
  std::vector<std::pair<std::string, std::string>> extra;
};

void write_report(const std::string& path, const Report& r) {
  std::ofstream os(path, std::ios::binary);
  os << "J = " << fmt(r.J) << "\n";
  os << "grad_norm = " << fmt(r.grad_norm) << "\n";
  os << "iters = " << r.iters << "\n";
  os << "u_linf = " << fmt(r.u_linf) << "\n";
  os << "y_linf = " << fmt(r.y_linf) << "\n";
  os << "M_active = " << (r.M_active ? "true" : "false") << "\n";
  os << "ball_active = " << (r.ball_active ? "true" : "false") << "\n";
  os << "status = " << r.status << "\n";
  for (const auto& [k, v] : r.extra) os << k << " = " << v << "\n";
}

std::string status_name(OptStatus s) {
  switch (s) {
    case OptStatus::Converged: return "converged";
    case OptStatus::MaxIter: return "max_iter";
    case OptStatus::Diverged: return "diverged";
  }
  return "unknown";
}

std::map<std::string, std::string> read_report(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read report '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

// --------------------------------------------------------------- commands

namespace fs = std::filesystem;

int run_state_like(const ExperimentConfig& cfg, const std::string& out_dir, bool with_adjoint,
                   std::ostream& log) {
  const std::string kind = cfg.get("problem", "kind", "parabolic");
  const unsigned seed = static_cast<unsigned>(cfg.get_int("run", "seed", 1));
  const SolveOptions solver = build_solver(cfg);
  Report rep;
  if (kind == "parabolic") {
    const GridPtr grid = build_grid(cfg, true);
    const ParabolicProblem problem = build_parabolic(cfg, grid);
    const SpaceTimeField u = control_expression(grid, cfg.get("problem", "u", "zero"), "u", seed);
    const SpaceTimeField y = solve_state(problem, u, solver);
    write_field_csv(out_dir + "/control.csv", u);
    write_field_csv(out_dir + "/state.csv", y);
    const SpaceTimeField diff(grid, y.values() - problem.yd.values());
    const double track = lp_norm(diff, 2.0);
    const double un = lp_norm(u, 2.0);
    rep.J = 0.5 * track * track + 0.5 * problem.alpha * un * un;
    rep.u_linf = lp_norm(u, kInfExponent);
    rep.y_linf = lp_norm(y, kInfExponent);
    if (with_adjoint) {
      const SpaceTimeField phi = solve_adjoint(problem, y, AdjointRhs::Tracking, solver);
      write_field_csv(out_dir + "/adjoint.csv", phi);
      Eigen::VectorXd g = phi.values() + problem.alpha * u.values();
      g.head(grid->node_count()).setZero();
      rep.grad_norm = lp_norm(SpaceTimeField(grid, std::move(g)), 2.0);
    }
  } else if (kind == "elliptic") {
    const GridPtr grid = build_grid(cfg, false);
    const EllipticProblem problem = build_elliptic(cfg, grid);
    const BoundaryField u = boundary_expression(grid, cfg.get("problem", "u", "zero"), "u", seed);
    const SpatialField y = solve_state_elliptic(problem, u, solver);
    write_field_csv(out_dir + "/control.csv", u);
    write_field_csv(out_dir + "/state.csv", y);
    const SpatialField diff(grid, y.values() - problem.yd.values());
    const double track = lp_norm(diff, 2.0);
    const double un = lp_norm(u, 2.0);
    rep.J = 0.5 * track * track + 0.5 * problem.alpha * un * un;
    rep.u_linf = u.size() ? u.values().cwiseAbs().maxCoeff() : 0.0;
    rep.y_linf = lp_norm(y, kInfExponent);
    if (with_adjoint) {
      const SpatialField phi = solve_adjoint_elliptic(problem, y, solver);
      write_field_csv(out_dir + "/adjoint.csv", phi);
      rep.grad_norm = lp_norm(
          BoundaryField(grid, trace(phi).values() + problem.alpha * u.values()), 2.0);
    }
  } else {
    throw ConfigError("[problem] kind must be parabolic or elliptic");
  }
  write_report(out_dir + "/report.txt", rep);
  log << "J = " << fmt(rep.J) << "\n";
  return 0;
}

template <class Result>
Report result_report(const Result& r) {
  Report rep;
  rep.J = r.J;
  rep.grad_norm = r.residual;
  rep.iters = r.iterations;
  rep.u_linf = r.u.size() ? r.u.values().cwiseAbs().maxCoeff() : 0.0;
  rep.y_linf = r.y.size() ? r.y.values().cwiseAbs().maxCoeff() : 0.0;
  rep.M_active = r.M_active;
  rep.ball_active = r.ball_active;
  rep.status = status_name(r.status);
  if (!r.detail.empty()) rep.extra.emplace_back("detail", r.detail);
  return rep;
}

int run_optimize(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log) {
  const std::string kind = cfg.get("problem", "kind", "parabolic");
  const unsigned seed = static_cast<unsigned>(cfg.get_int("run", "seed", 1));
  const OptimizeOptions opts = build_optimize(cfg);
  Report rep;
  if (kind == "parabolic") {
    const GridPtr grid = build_grid(cfg, true);
    const ParabolicProblem problem = build_parabolic(cfg, grid);
    const SpaceTimeField u0 = control_expression(grid, cfg.get("optimize", "u0", "zero"), "u0", seed);
    const ParabolicResult r = solve_unconstrained(problem, u0, opts);
    write_field_csv(out_dir + "/control.csv", r.u);
    if (r.status != OptStatus::Diverged) {
      write_field_csv(out_dir + "/state.csv", r.y);
      write_field_csv(out_dir + "/adjoint.csv", r.phi);
    }
    rep = result_report(r);
    write_report(out_dir + "/report.txt", rep);
    log << "status = " << rep.status << ", J = " << fmt(rep.J) << "\n";
    return r.status == OptStatus::Diverged ? 3 : 0;
  }
  if (kind == "elliptic") {
    const GridPtr grid = build_grid(cfg, false);
    const EllipticProblem problem = build_elliptic(cfg, grid);
    const BoundaryField u0 = boundary_expression(grid, cfg.get("optimize", "u0", "zero"), "u0", seed);
    const EllipticResult r = solve_unconstrained(problem, u0, opts);
    write_field_csv(out_dir + "/control.csv", r.u);
    if (r.status != OptStatus::Diverged) {
      write_field_csv(out_dir + "/state.csv", r.y);
      write_field_csv(out_dir + "/adjoint.csv", r.phi);
    }
    rep = result_report(r);
    write_report(out_dir + "/report.txt", rep);
    log << "status = " << rep.status << ", J = " << fmt(rep.J) << "\n";
    return r.status == OptStatus::Diverged ? 3 : 0;
  }
  throw ConfigError("[problem] kind must be parabolic or elliptic");
}

template <class Problem, class Control>
int run_homotopy_impl(const Problem& problem, const Control& u0, const OptimizeOptions& opts,
                      bool parallel, const std::string& out_dir, std::ostream& log) {
  const auto outcome = homotopy(problem, u0, opts, parallel);
  write_field_csv(out_dir + "/control_ref.csv", outcome.unconstrained.u);

  std::ofstream os(out_dir + "/homotopy.csv", std::ios::binary);
  os << "M,d,J,residual,M_active,ball_active\n";
  for (std::size_t i = 0; i < outcome.per_M.size(); ++i) {
    const auto& r = outcome.per_M[i];
    char name[64];
    std::snprintf(name, sizeof(name), "%s/control_M%02zu.csv", out_dir.c_str(), i);
    write_field_csv(name, r.u);
    os << fmt(opts.M_schedule[i]) << "," << fmt(outcome.distances[i]) << "," << fmt(r.J) << ","
       << fmt(r.residual) << "," << (r.M_active ? 1 : 0) << "," << (r.ball_active ? 1 : 0)
       << "\n";
  }
  os.close();

  Report rep = result_report(outcome.per_M.back());
  rep.extra.emplace_back("d_last", fmt(outcome.distances.back()));
  rep.extra.emplace_back("u_ref_linf",
                         fmt(outcome.unconstrained.u.values().cwiseAbs().maxCoeff()));
  write_report(out_dir + "/report.txt", rep);
  log << "homotopy entries = " << outcome.per_M.size()
      << ", d_last = " << fmt(outcome.distances.back()) << "\n";
  for (const auto& r : outcome.per_M)
    if (r.status == OptStatus::Diverged) return 3;
  return outcome.unconstrained.status == OptStatus::Diverged ? 3 : 0;
}

int run_homotopy_cmd(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log) {
  const std::string kind = cfg.get("problem", "kind", "parabolic");
  const unsigned seed = static_cast<unsigned>(cfg.get_int("run", "seed", 1));
  OptimizeOptions opts = build_optimize(cfg);
  if (opts.M_schedule.empty())
    throw ConfigError("[optimize] M_schedule required for the homotopy command");
  const bool parallel = cfg.get_bool("run", "parallel", false);
  if (kind == "parabolic") {
    const GridPtr grid = build_grid(cfg, true);
    const ParabolicProblem problem = build_parabolic(cfg, grid);
    const SpaceTimeField u0 = control_expression(grid, cfg.get("optimize", "u0", "zero"), "u0", seed);
    return run_homotopy_impl(problem, u0, opts, parallel, out_dir, log);
  }
  if (kind == "elliptic") {
    const GridPtr grid = build_grid(cfg, false);
    const EllipticProblem problem = build_elliptic(cfg, grid);
    const BoundaryField u0 = boundary_expression(grid, cfg.get("optimize", "u0", "zero"), "u0", seed);
    return run_homotopy_impl(problem, u0, opts, parallel, out_dir, log);
  }
  throw ConfigError("[problem] kind must be parabolic or elliptic");
}

int run_counterexample(const ExperimentConfig& cfg, const std::string& out_dir,
                       std::ostream& log) {
  const int n = cfg.get_int("counterexample", "n", 2);
  const int K = cfg.get_int("counterexample", "K", 8);
  const bool with_cubic = cfg.get_bool("counterexample", "with_cubic", true);
  const int nodes = cfg.get_int("counterexample", "nodes", 21);
  const int m_max = cfg.get_int("counterexample", "m_max", 8);

  const BumpSeries series(n, K);

  // growth table: worst sampled value inside Q_{2^-m, 2^-2m} vs H_m
  std::ofstream growth(out_dir + "/growth.csv", std::ios::binary);
  growth << "m,H_m,min_sampled\n";
  double harmonic = 0.0;
  for (int m = 1; m <= m_max; ++m) {
    harmonic += 1.0 / m;
    const double rx = std::ldexp(1.0, -m);
    const double rt = std::ldexp(1.0, -2 * m);
    double min_val = std::numeric_limits<double>::infinity();
    const int probes = 5;
    for (int ix = 0; ix < probes; ++ix) {
      for (int it = 0; it < probes; ++it) {
        // radial sweep inside the ball times the full time slab
        const double frac = static_cast<double>(ix) / (probes - 1);
        Point x{frac * rx / std::sqrt(static_cast<double>(n)), 0.0, 0.0};
        for (int d = 1; d < n; ++d) x[d] = x[0];
        const double t = 1.0 - rt + 2.0 * rt * it / (probes - 1);
        min_val = std::min(min_val, BumpSeries(n, m).value(x, t));
      }
    }
    growth << m << "," << fmt(harmonic) << "," << fmt(min_val) << "\n";
  }
  growth.close();

  std::ofstream seriescsv(out_dir + "/series.csv", std::ios::binary);
  seriescsv << "K,dt_partial,dxx_partial\n";
  for (int k = 1; k <= K; ++k) {
    const BumpSeries partial(n, k);
    seriescsv << k << "," << fmt(partial.norm_series(BumpDerivative::Dt).value) << ","
              << fmt(partial.norm_series(BumpDerivative::Dxx).value) << "\n";
  }
  seriescsv.close();

  const double l2_plain = series.control_l2(false, nodes);
  const double l2_cubic = with_cubic ? series.control_l2(true, nodes) : std::nan("");

  Report rep;
  rep.status = "ok";
  rep.extra.emplace_back("control_l2", fmt(l2_plain));
  if (with_cubic) rep.extra.emplace_back("control_l2_cubic", fmt(l2_cubic));
  rep.extra.emplace_back("dt_series", fmt(series.norm_series(BumpDerivative::Dt).value));
  rep.extra.emplace_back("dxx_series", fmt(series.norm_series(BumpDerivative::Dxx).value));
  write_report(out_dir + "/report.txt", rep);
  log << "control_l2 = " << fmt(l2_plain) << "\n";
  return 0;
}

int run_exponents(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log) {
  const int n = cfg.get_int("exponents", "n", 3);
  const Rational r = parse_rational(cfg.get("exponents", "r", "2"));

  Report rep;
  rep.status = "ok";
  if (n >= 2) rep.extra.emplace_back("gn", to_string(gn_exponent(n)));
  const ExponentReport par = parabolic_exponent(r, n);
  rep.extra.emplace_back("q_valid", par.valid ? "true" : "false");
  if (par.valid && par.q) rep.extra.emplace_back("q", to_string(*par.q));
  if (par.valid && par.q_unbounded) rep.extra.emplace_back("q", "unbounded");
  if (!par.valid) rep.extra.emplace_back("q_message", par.message);
  if (n >= 3) {
    const BootstrapChain chain = bootstrap_steps(n);
    rep.extra.emplace_back("bootstrap_steps", std::to_string(chain.steps));
    std::string c;
    for (const auto& e : chain.chain) {
      if (!c.empty()) c += ",";
      c += to_string(e);
    }
    rep.extra.emplace_back("bootstrap_chain", c);
    const ExponentReport ell = elliptic_exponents(r, n);
    rep.extra.emplace_back("elliptic_valid", ell.valid ? "true" : "false");
    if (ell.valid) {
      rep.extra.emplace_back("s", to_string(*ell.s));
      rep.extra.emplace_back("p", to_string(*ell.p));
      rep.extra.emplace_back("elliptic_q", to_string(*ell.q));
      rep.extra.emplace_back("q_tilde", to_string(*ell.q_tilde));
    } else {
      rep.extra.emplace_back("elliptic_message", ell.message);
    }
  }
  write_report(out_dir + "/report.txt", rep);
  for (const auto& [k, v] : rep.extra) log << k << " = " << v << "\n";
  return 0;
}

int run_verify(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log) {
  const std::string kind = cfg.get("problem", "kind", "parabolic");
  const SolveOptions solver = build_solver(cfg);
  const double grad_tol = cfg.get_double("optimize", "grad_tol", 1e-8);
  const auto report = read_report(out_dir + "/report.txt");

  double grad_norm = 0.0;
  if (kind == "parabolic") {
    const GridPtr grid = build_grid(cfg, true);
    const ParabolicProblem problem = build_parabolic(cfg, grid);
    const Eigen::VectorXd uv = read_field_values(out_dir + "/control.csv", *grid);
    const SpaceTimeField u(grid, uv);
    const SpaceTimeField y = solve_state(problem, u, solver);
    const SpaceTimeField phi = solve_adjoint(problem, y, AdjointRhs::Tracking, solver);
    Eigen::VectorXd g = phi.values() + problem.alpha * u.values();
    g.head(grid->node_count()).setZero();
    grad_norm = lp_norm(SpaceTimeField(grid, std::move(g)), 2.0);
  } else if (kind == "elliptic") {
    const GridPtr grid = build_grid(cfg, false);
    const EllipticProblem problem = build_elliptic(cfg, grid);
    const Eigen::VectorXd uv = read_field_values(out_dir + "/control.csv", *grid);
    const BoundaryField u(grid, uv);
    const SpatialField y = solve_state_elliptic(problem, u, solver);
    const SpatialField phi = solve_adjoint_elliptic(problem, y, solver);
    grad_norm =
        lp_norm(BoundaryField(grid, trace(phi).values() + problem.alpha * u.values()), 2.0);
  } else {
    throw ConfigError("[problem] kind must be parabolic or elliptic");
  }

  log << "recomputed grad_norm = " << fmt(grad_norm) << " (grad_tol = " << fmt(grad_tol) << ")\n";
  if (auto it = report.find("grad_norm"); it != report.end())
    log << "reported grad_norm = " << it->second << "\n";
  if (grad_norm > grad_tol) {
    log << "verify: FAILED, gradient norm above grad_tol\n";
    return 4;
  }
  log << "verify: OK\n";
  return 0;
}

}  // namespace

// ------------------------------------------------------- config object

bool ExperimentConfig::has(const std::string& section, const std::string& key) const {
  const auto s = sections.find(section);
  return s != sections.end() && s->second.count(key) > 0;
}

std::string ExperimentConfig::get(const std::string& section, const std::string& key,
                                  const std::string& fallback) const {
  const auto s = sections.find(section);
  if (s == sections.end()) return fallback;
  const auto k = s->second.find(key);
  return k == s->second.end() ? fallback : k->second;
}

std::string ExperimentConfig::require(const std::string& section, const std::string& key) const {
  if (!has(section, key))
    throw ConfigError("missing required key '" + key + "' in section [" + section + "]");
  return get(section, key, "");
}

double ExperimentConfig::get_double(const std::string& section, const std::string& key,
                                    double fallback) const {
  if (!has(section, key)) return fallback;
  try {
    return std::stod(get(section, key, ""));
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "' in [" + section + "] is not a number");
  }
}

int ExperimentConfig::get_int(const std::string& section, const std::string& key,
                              int fallback) const {
  if (!has(section, key)) return fallback;
  try {
    return std::stoi(get(section, key, ""));
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "' in [" + section + "] is not an integer");
  }
}

bool ExperimentConfig::get_bool(const std::string& section, const std::string& key,
                                bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key, "");
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "' in [" + section + "] is not a boolean");
}

std::vector<double> ExperimentConfig::get_doubles(const std::string& section,
                                                  const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split(require(section, key), ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "' in [" + section + "] has a non-numeric entry");
    }
  }
  return out;
}

std::vector<int> ExperimentConfig::get_ints(const std::string& section,
                                            const std::string& key) const {
  std::vector<int> out;
  for (const auto& item : split(require(section, key), ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "' in [" + section + "] has a non-integer entry");
    }
  }
  return out;
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (allowed_keys().count(section) == 0)
        throw ConfigError("unknown section [" + section + "]");
      cfg.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const auto& allowed = allowed_keys().at(section);
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
    cfg.sections[section][key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str());
}

// ------------------------------------------------------------- CSV

namespace {

void write_rows(std::ofstream& os, const GridSpec& g, double t, const Eigen::VectorXd& values,
                const std::vector<long>* nodes) {
  const long count = nodes ? static_cast<long>(nodes->size()) : g.node_count();
  for (long i = 0; i < count; ++i) {
    const long p = nodes ? (*nodes)[i] : i;
    const auto x = g.coords(p);
    os << fmt(t);
    for (int d = 0; d < g.dim(); ++d) os << "," << fmt(x[d]);
    os << "," << fmt(values[i]) << "\n";
  }
}

std::string csv_header(const GridSpec& g) {
  std::string h = "t";
  for (int d = 0; d < g.dim(); ++d) h += ",x" + std::to_string(d + 1);
  return h + ",value";
}

}  // namespace

void write_field_csv(const std::string& path, const SpaceTimeField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write '" + path + "'");
  const GridSpec& g = f.grid();
  os << csv_header(g) << "\n";
  for (int m = 0; m <= g.nt(); ++m)
    write_rows(os, g, m * g.tau(), f.level(m), nullptr);
}

void write_field_csv(const std::string& path, const SpatialField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write '" + path + "'");
  os << csv_header(f.grid()) << "\n";
  write_rows(os, f.grid(), 0.0, f.values(), nullptr);
}

void write_field_csv(const std::string& path, const BoundaryField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write '" + path + "'");
  os << csv_header(f.grid()) << "\n";
  write_rows(os, f.grid(), 0.0, f.values(), &f.grid().boundary_nodes());
}

CsvTable read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read '" + path + "'");
  CsvTable table;
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("empty CSV '" + path + "'");
  table.header = split(line, ',');
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    const auto items = split(line, ',');
    std::vector<double> row;
    row.reserve(items.size());
    for (const auto& item : items) {
      try {
        row.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw ConfigError("non-numeric cell in '" + path + "'");
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

Eigen::VectorXd read_field_values(const std::string& path, const GridSpec& grid) {
  const CsvTable table = read_csv(path);
  const long rows = static_cast<long>(table.rows.size());
  const bool ok = rows == grid.space_time_count() || rows == grid.node_count() ||
                  rows == grid.boundary_count();
  if (!ok)
    throw ConfigError("row count of '" + path + "' does not match the configured grid");
  Eigen::VectorXd v(rows);
  for (long i = 0; i < rows; ++i) {
    if (table.rows[i].empty()) throw ConfigError("empty row in '" + path + "'");
    v[i] = table.rows[i].back();
  }
  return v;
}

// -------------------------------------------------------------- drivers

int run_experiment(const std::string& command, const std::string& config_path,
                   const std::string& output_dir_override, std::ostream& log) {
  try {
    const ExperimentConfig cfg = parse_config_file(config_path);
    std::string out_dir = output_dir_override.empty()
                              ? cfg.get("run", "output_dir", "out")
                              : output_dir_override;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + out_dir + "'");

    if (command == "state") return run_state_like(cfg, out_dir, false, log);
    if (command == "adjoint") return run_state_like(cfg, out_dir, true, log);
    if (command == "optimize") return run_optimize(cfg, out_dir, log);
    if (command == "homotopy") return run_homotopy_cmd(cfg, out_dir, log);
    if (command == "counterexample") return run_counterexample(cfg, out_dir, log);
    if (command == "exponents") return run_exponents(cfg, out_dir, log);
    if (command == "verify") return run_verify(cfg, out_dir, log);
    throw ConfigError("unknown command '" + command + "'");
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return 2;
  } catch (const SolverError& e) {
    log << "solver divergence: " << e.what() << " (step " << e.step() << ", residual "
        << e.residual() << ")\n";
    return 3;
  } catch (const ValidationError& e) {
    log << "validation failure: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    log << "validation failure: " << e.what() << "\n";
    return 4;
  }
}

int diff_artifacts(const std::string& path_a, const std::string& path_b, double tol,
                   std::ostream& log) {
  try {
    const CsvTable a = read_csv(path_a);
    const CsvTable b = read_csv(path_b);
    if (a.header != b.header || a.rows.size() != b.rows.size()) {
      log << "diff: shape mismatch\n";
      return 2;
    }
    double worst = 0.0;
    std::size_t worst_row = 0, worst_col = 0;
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      if (a.rows[i].size() != b.rows[i].size()) {
        log << "diff: shape mismatch at row " << i << "\n";
        return 2;
      }
      for (std::size_t j = 0; j < a.rows[i].size(); ++j) {
        const double d = std::abs(a.rows[i][j] - b.rows[i][j]);
        if (d > worst) {
          worst = d;
          worst_row = i;
          worst_col = j;
        }
      }
    }
    log << "max abs difference = " << fmt(worst);
    if (!a.rows.empty()) {
      log << " at row " << worst_row << " (";
      for (std::size_t j = 0; j + 1 < a.rows[worst_row].size(); ++j) {
        if (j) log << ", ";
        log << a.header[j] << " = " << fmt(a.rows[worst_row][j]);
      }
      log << "), column '" << a.header[worst_col] << "'\n";
    } else {
      log << "\n";
    }
    return worst <= tol ? 0 : 1;
  } catch (const ConfigError& e) {
    log << "diff: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace semicontrol
