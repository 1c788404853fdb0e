#include "csvortex/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <array>
#include <optional>
#include <chrono>
#include <cmath>

#include "csvortex/errors.hpp"
#include "csvortex/parallel.hpp"
#include "dst_preconditioner.hpp"

namespace csvortex {

std::string to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::minimize:
      return "minimize";
    case SolveMethod::newton:
      return "newton";
    case SolveMethod::both:
      return "both";
  }
  return "both";
}

SolveMethod parse_solve_method(const std::string& name) {
  if (name == "minimize") return SolveMethod::minimize;
  if (name == "newton") return SolveMethod::newton;
  if (name == "both") return SolveMethod::both;
  throw ConfigError("solver.method", "expected one of \"minimize\", \"newton\", \"both\"");
}

void SolveSettings::validate(int target_nodes) const {
  if (!(residual_tol > 0.0)) throw ConfigError("solver.residual_tol", "must be > 0");
  if (max_iterations < 1) throw ConfigError("solver.max_iterations", "must be >= 1");
  if (max_gradient_steps < 1) throw ConfigError("solver.max_gradient_steps", "must be >= 1");
  if (!(backtrack > 0.0 && backtrack < 1.0)) throw ConfigError("solver.backtrack", "must lie in (0, 1)");
  if (!(armijo > 0.0 && armijo < 0.5)) throw ConfigError("solver.armijo", "must lie in (0, 0.5)");
  if (!(agreement_tol > 0.0)) throw ConfigError("solver.agreement_tol", "must be > 0");
  for (std::size_t k = 0; k < continuation.size(); ++k) {
    const std::string path = "solver.continuation[" + std::to_string(k) + "]";
    if (continuation[k] < 33 || continuation[k] % 2 == 0) throw ConfigError(path, "must be an odd integer >= 33");
    if (k > 0 && continuation[k] <= continuation[k - 1]) throw ConfigError(path, "ladder must be strictly increasing");
  }
  if (!continuation.empty() && continuation.back() != target_nodes)
    throw ConfigError("solver.continuation", "last level must equal grid.nodes");
}

double core_weight(const VortexConfiguration& vc, Point p) {
  double outside = 1.0;
  for (const VortexSite& site : vc.sites()) {
    const double d = std::hypot(p.x - site.location.x, p.y - site.location.y);
    const double t = std::clamp((d - kSourceBlend[0]) / (kSourceBlend[1] - kSourceBlend[0]), 0.0, 1.0);
    outside *= t * t * t * (t * (6.0 * t - 15.0) + 10.0);
  }
  return 1.0 - outside;
}

DiscreteProblem::DiscreteProblem(VortexConfiguration vc, ConformalFactor cf, GridSpec spec)
    : vc_(std::move(vc)), cf_(std::move(cf)), spec_(spec) {
  spec_.validate();
  require_clear_nodes(spec_, vc_);
  b_ = ScalarGrid::sample(spec_, [&](Point p) { return cf_.evaluate(p); });
  h0_ = ScalarGrid::sample(spec_, [&](Point p) { return eval_h0(vc_, p); });
  weight_ = ScalarGrid::sample(spec_, [&](Point p) { return eval_B(vc_, p); });
  u0_ = ScalarGrid::sample(spec_, [&](Point p) { return eval_u0(vc_, p); });
  ring_ = BoundaryRing::sample(spec_, [&](Point p) { return -eval_u0(vc_, p); });
  if (!u0_.all_finite() || !b_.all_finite()) throw NumericalError("background fields are not finite on the grid");
  // Away from the cores blend h0 into -Δh u0: the scheme then acts on w
  // itself there, and the discrete maximum principle keeps w <= 0.
  const int m = spec_.cells();
  const double inv_h2 = 1.0 / (spec_.spacing() * spec_.spacing());
  auto u0_at = [&](int i, int j) { return (i < 0 || j < 0 || i >= m || j >= m) ? -ring_.at(i, j) : u0_(i, j); };
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      const double keep = core_weight(vc_, spec_.node(i, j));
      if (keep == 1.0) continue;
      const double discrete =
          -(u0_at(i - 1, j) + u0_at(i + 1, j) + u0_at(i, j - 1) + u0_at(i, j + 1) - 4.0 * u0_(i, j)) * inv_h2;
      h0_(i, j) = keep * h0_(i, j) + (1.0 - keep) * discrete;
    }
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

constexpr double kOverflowLimit = 50.0;

/// Flat per-level kernels. Fields are stored on an (m+2)² padded layout
/// whose outer ring holds the Dirichlet data.
class Kernels {
 public:
  explicit Kernels(const DiscreteProblem& p)
      : p_(p), m_(p.spec().cells()), s_(m_ + 2), h_(p.spec().spacing()), h2_(h_ * h_) {
    pu_.assign(static_cast<std::size_t>(s_) * s_, 0.0);
    pd_.assign(static_cast<std::size_t>(s_) * s_, 0.0);
    for (int i = -1; i <= m_; ++i) {
      pu_[idx(i, -1)] = p.ring().at(i, -1);
      pu_[idx(i, m_)] = p.ring().at(i, m_);
    }
    for (int j = 0; j < m_; ++j) {
      pu_[idx(-1, j)] = p.ring().at(-1, j);
      pu_[idx(m_, j)] = p.ring().at(m_, j);
    }
  }

  int m() const { return m_; }
  std::size_t n() const { return static_cast<std::size_t>(m_) * m_; }
  double h2() const { return h2_; }

  void load_u(std::span<const double> u) {
    for (int j = 0; j < m_; ++j)
      std::copy_n(u.begin() + static_cast<std::ptrdiff_t>(j) * m_, m_, pu_.begin() + idx(0, j));
    for (double v : u)
      if (v > kOverflowLimit) throw NumericalError("u exceeded the overflow guard (u <= 50)");
  }
  void load_direction(std::span<const double> d) {
    for (int j = 0; j < m_; ++j)
      std::copy_n(d.begin() + static_cast<std::ptrdiff_t>(j) * m_, m_, pd_.begin() + idx(0, j));
  }

  /// r = Δ0u/b - (Be^u(Be^u - 1) + h0/b) for the loaded u.
  void residual(std::span<double> r) const {
    for_rows(m_, [&](int j) {
      for (int i = 0; i < m_; ++i) {
        const std::size_t c = idx(i, j), k = node(i, j);
        const double lap = (pu_[c - 1] + pu_[c + 1] + pu_[c - s_] + pu_[c + s_] - 4.0 * pu_[c]) / h2_;
        const double em1 = std::expm1(u0(k) + pu_[c]);
        const double bk = b(k);
        r[k] = (lap - bk * (1.0 + em1) * em1 - h0(k)) / bk;
      }
    });
  }

  /// ∂E/∂u = -2Δ²(Δ0 u - b t (t - 1) - h0).
  void gradient(std::span<double> g) const {
    for_rows(m_, [&](int j) {
      for (int i = 0; i < m_; ++i) {
        const std::size_t c = idx(i, j), k = node(i, j);
        const double lap = (pu_[c - 1] + pu_[c + 1] + pu_[c - s_] + pu_[c + s_] - 4.0 * pu_[c]);
        const double em1 = std::expm1(u0(k) + pu_[c]);
        g[k] = -2.0 * (lap - h2_ * (b(k) * (1.0 + em1) * em1 + h0(k)));
      }
    });
  }

  EnergyParts energy() const {
    EnergyParts e;
    e.dirichlet = reduce_rows(m_, [&](int j) {
      CompensatedSum s;
      for (int i = -1; i < m_; ++i) {
        const double a = pu_[idx(i + 1, j)] - pu_[idx(i, j)];
        s.add(a * a);
      }
      for (int i = 0; i < m_; ++i) {
        const double a = pu_[idx(i, j)] - pu_[idx(i, j - 1)];
        s.add(a * a);
        if (j == m_ - 1) {
          const double top = pu_[idx(i, m_)] - pu_[idx(i, j)];
          s.add(top * top);
        }
      }
      return s.value();
    });
    e.potential = h2_ * reduce_rows(m_, [&](int j) {
                    CompensatedSum s;
                    for (int i = 0; i < m_; ++i) {
                      const std::size_t k = node(i, j);
                      const double em1 = std::expm1(u0(k) + pu_[idx(i, j)]);
                      s.add(b(k) * em1 * em1);
                    }
                    return s.value();
                  });
    e.source = 2.0 * h2_ * reduce_rows(m_, [&](int j) {
                 CompensatedSum s;
                 for (int i = 0; i < m_; ++i) s.add(h0(node(i, j)) * pu_[idx(i, j)]);
                 return s.value();
               });
    return e;
  }

  /// E(u + α d) - E(u) for the loaded u and direction d.
  double energy_change(double alpha) const {
    return reduce_rows(m_, [&](int j) {
      CompensatedSum s;
      auto edge = [&](std::size_t p, std::size_t q) {
        const double a = pu_[p] - pu_[q], d = alpha * (pd_[p] - pd_[q]);
        s.add(d * (2.0 * a + d));
      };
      for (int i = -1; i < m_; ++i) edge(idx(i + 1, j), idx(i, j));
      for (int i = 0; i < m_; ++i) {
        edge(idx(i, j), idx(i, j - 1));
        if (j == m_ - 1) edge(idx(i, m_), idx(i, j));
      }
      for (int i = 0; i < m_; ++i) {
        const std::size_t c = idx(i, j), k = node(i, j);
        const double em1 = std::expm1(u0(k) + pu_[c]);
        const double t = 1.0 + em1;
        const double step = std::expm1(alpha * pd_[c]);
        s.add(h2_ * b(k) * t * step * (t * step + 2.0 * em1));
        s.add(2.0 * h2_ * h0(k) * alpha * pd_[c]);
      }
      return s.value();
    });
  }

  /// First and second derivative of α ↦ E(u + α d).
  std::array<double, 2> line_derivatives(double alpha) const {
    std::vector<double> first(m_), second(m_);
    for_rows(m_, [&](int j) {
      CompensatedSum d1, d2;
      auto edge = [&](std::size_t p, std::size_t q) {
        const double a = pu_[p] - pu_[q], d = pd_[p] - pd_[q];
        d1.add(2.0 * d * (a + alpha * d));
        d2.add(2.0 * d * d);
      };
      for (int i = -1; i < m_; ++i) edge(idx(i + 1, j), idx(i, j));
      for (int i = 0; i < m_; ++i) {
        edge(idx(i, j), idx(i, j - 1));
        if (j == m_ - 1) edge(idx(i, m_), idx(i, j));
      }
      for (int i = 0; i < m_; ++i) {
        const std::size_t c = idx(i, j), k = node(i, j);
        const double d = pd_[c];
        const double em1 = std::expm1(u0(k) + pu_[c] + alpha * d);
        const double t = 1.0 + em1;
        d1.add(2.0 * h2_ * (b(k) * t * em1 + h0(k)) * d);
        d2.add(2.0 * h2_ * b(k) * t * (2.0 * t - 1.0) * d * d);
      }
      first[j] = d1.value();
      second[j] = d2.value();
    });
    return {stable_sum(first), stable_sum(second)};
  }

  /// Diagonal of the Hessian's potential part per unit area: b t (2t - 1).
  double curvature(std::size_t k, double u) const {
    const double t = std::exp(u0(k) + u);
    return b(k) * t * (2.0 * t - 1.0);
  }

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j + 1) * s_ + (i + 1); }
  std::size_t node(int i, int j) const { return static_cast<std::size_t>(j) * m_ + i; }
  double b(std::size_t k) const { return p_.b().values()[k]; }
  double h0(std::size_t k) const { return p_.h0().values()[k]; }
  double u0(std::size_t k) const { return p_.u0().values()[k]; }

  const DiscreteProblem& p_;
  int m_, s_;
  double h_, h2_;
  std::vector<double> pu_, pd_;
};

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  CompensatedSum s;
  for (std::size_t k = 0; k < a.size(); ++k) s.add(a[k] * b[k]);
  return s.value();
}

std::vector<GridSpec> ladder(const GridSpec& grid, const SolveSettings& settings) {
  std::vector<GridSpec> levels;
  for (int n : settings.continuation) levels.push_back({grid.half_width, n});
  if (levels.empty()) levels.push_back(grid);
  return levels;
}

struct LevelOutcome {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> energy;
  std::string message;
};

LevelOutcome newton_level(const DiscreteProblem& problem, ScalarGrid& u, const SolveSettings& settings) {
  Kernels k(problem);
  const int m = k.m();
  const std::size_t n = k.n();
  const double inv_h2 = 1.0 / k.h2();
  LevelOutcome out;

  // -Δh + diag(b t (2t - 1)), lower triangle plus diagonal.
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(3 * n);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      const int c = j * m + i;
      triplets.emplace_back(c, c, 4.0 * inv_h2);
      if (i > 0) triplets.emplace_back(c, c - 1, -inv_h2);
      if (j > 0) triplets.emplace_back(c, c - m, -inv_h2);
    }
  Eigen::SparseMatrix<double> jac(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  jac.setFromTriplets(triplets.begin(), triplets.end());
  jac.makeCompressed();
  std::vector<double*> diagonal(n);
  for (Eigen::Index col = 0; col < jac.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(jac, col); it; ++it)
      if (it.row() == col) diagonal[static_cast<std::size_t>(col)] = &it.valueRef();

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower> ldlt;
  ldlt.analyzePattern(jac);

  std::vector<double> r(n), r_try(n), trial(n);
  k.load_u(u.values());
  k.residual(r);
  out.residual = max_abs(r);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));

  while (true) {
    if (out.residual <= settings.residual_tol) {
      out.converged = true;
      return out;
    }
    if (out.iterations >= settings.max_iterations) {
      out.message = "Newton reached max_iterations";
      return out;
    }
    ++out.iterations;
    for (std::size_t c = 0; c < n; ++c) *diagonal[c] = 4.0 * inv_h2 + k.curvature(c, u.values()[c]);
    ldlt.factorize(jac);
    if (ldlt.info() != Eigen::Success) {
      out.message = "Newton Jacobian factorization failed";
      return out;
    }
    for (std::size_t c = 0; c < n; ++c) rhs[static_cast<Eigen::Index>(c)] = problem.b().values()[c] * r[c];
    const Eigen::VectorXd step = ldlt.solve(rhs);

    const double merit = dot(r, r);
    double alpha = 1.0;
    bool accepted = false;
    while (alpha > 1e-10) {
      for (std::size_t c = 0; c < n; ++c) trial[c] = u.values()[c] + alpha * step[static_cast<Eigen::Index>(c)];
      try {
        k.load_u(trial);
        k.residual(r_try);
        if (dot(r_try, r_try) <= (1.0 - 2.0 * settings.armijo * alpha) * merit) {
          accepted = true;
          break;
        }
      } catch (const NumericalError&) {
      }
      alpha *= settings.backtrack;
    }
    if (!accepted) {
      k.load_u(u.values());
      out.message = "Newton line search failed to reduce the residual";
      return out;
    }
    std::copy(trial.begin(), trial.end(), u.values().begin());
    r.swap(r_try);
    out.residual = max_abs(r);
  }
}

LevelOutcome minimize_level(const DiscreteProblem& problem, ScalarGrid& u, const SolveSettings& settings) {
  Kernels k(problem);
  const std::size_t n = k.n();
  const double two_h2 = 2.0 * k.h2();
  LevelOutcome out;

  const auto bvals = problem.b().values();
  double mean_b = 0.0;
  for (double v : bvals) mean_b += v;
  mean_b /= static_cast<double>(n);
  detail::DirichletHelmholtzSolver precond(k.m(), problem.spec().spacing(), mean_b, two_h2);

  std::vector<double> g(n), z(n), d(n), g_new(n), z_new(n);
  auto residual_norm = [&](std::span<const double> grad) {
    double worst = 0.0;
    for (std::size_t c = 0; c < n; ++c) worst = std::max(worst, std::fabs(grad[c] / (two_h2 * bvals[c])));
    return worst;
  };

  k.load_u(u.values());
  double energy = k.energy().total();
  out.energy.push_back(energy);
  k.gradient(g);
  out.residual = residual_norm(g);
  precond.apply(g, z);
  for (std::size_t c = 0; c < n; ++c) d[c] = -z[c];
  double gz = dot(g, z);
  bool steepest = true;

  while (true) {
    if (out.residual <= settings.residual_tol) {
      out.converged = true;
      return out;
    }
    if (out.iterations >= settings.max_gradient_steps) {
      out.message = "minimizer reached max_gradient_steps";
      return out;
    }
    double slope = dot(g, d);
    if (!(slope < 0.0)) {
      for (std::size_t c = 0; c < n; ++c) d[c] = -z[c];
      slope = -gz;
      steepest = true;
    }
    k.load_direction(d);

    // Newton iterations on φ'(α) = 0, then backtracking until Armijo holds.
    auto [d1, d2] = k.line_derivatives(0.0);
    double alpha = d2 > 0.0 ? -d1 / d2 : 1.0;
    for (int it = 0; it < 4; ++it) {
      const auto [p1, p2] = k.line_derivatives(alpha);
      if (std::fabs(p1) <= 1e-3 * std::fabs(slope)) break;
      if (p2 > 0.0) {
        const double next = alpha - p1 / p2;
        alpha = next > 0.0 ? next : 0.5 * alpha;
      } else {
        alpha = p1 < 0.0 ? 2.0 * alpha : 0.5 * alpha;
      }
    }
    double change = k.energy_change(alpha);
    int cuts = 0;
    while (!(change <= settings.armijo * alpha * slope) && cuts < 60) {
      alpha *= settings.backtrack;
      change = k.energy_change(alpha);
      ++cuts;
    }
    if (!(change <= 0.0) || !(change <= settings.armijo * alpha * slope)) {
      if (!steepest) {
        for (std::size_t c = 0; c < n; ++c) d[c] = -z[c];
        steepest = true;
        continue;
      }
      out.message = "minimizer line search stalled";
      return out;
    }
    ++out.iterations;
    for (std::size_t c = 0; c < n; ++c) u.values()[c] += alpha * d[c];
    energy += change;
    out.energy.push_back(energy);
    k.load_u(u.values());
    k.gradient(g_new);
    out.residual = residual_norm(g_new);
    precond.apply(g_new, z_new);
    // Polak-Ribière+.
    const double beta = std::max(0.0, (dot(g_new, z_new) - dot(g_new, z)) / gz);
    gz = dot(g_new, z_new);
    for (std::size_t c = 0; c < n; ++c) d[c] = -z_new[c] + beta * d[c];
    steepest = beta == 0.0;
    g.swap(g_new);
    z.swap(z_new);
  }
}

template <class LevelFn>
MethodResult run_ladder(const VortexConfiguration& vc, const ConformalFactor& cf, const GridSpec& grid,
                        const SolveSettings& settings, LevelFn&& level_fn) {
  const auto t0 = Clock::now();
  MethodResult result;
  ScalarGrid u;
  std::optional<DiscreteProblem> previous;
  for (const GridSpec& spec : ladder(grid, settings)) {
    DiscreteProblem problem(vc, cf, spec);
    u = previous ? resample(u, previous->ring(), spec) : ScalarGrid(spec);
    LevelOutcome outcome = level_fn(problem, u, settings);
    result.levels.push_back({spec.nodes, outcome.iterations, outcome.residual, outcome.converged});
    result.iterations += outcome.iterations;
    result.residual = outcome.residual;
    result.converged = outcome.converged;
    result.message = outcome.message;
    result.energy_history = std::move(outcome.energy);
    result.energy = discrete_energy(u, problem);
    previous.emplace(std::move(problem));
  }
  result.u = std::move(u);
  result.wall_time = seconds_since(t0);
  return result;
}

}  // namespace

EnergyParts discrete_energy_parts(const ScalarGrid& u, const DiscreteProblem& problem) {
  Kernels k(problem);
  k.load_u(u.values());
  return k.energy();
}

double discrete_energy(const ScalarGrid& u, const DiscreteProblem& problem) {
  return discrete_energy_parts(u, problem).total();
}

ScalarGrid residual(const ScalarGrid& u, const DiscreteProblem& problem) {
  Kernels k(problem);
  k.load_u(u.values());
  ScalarGrid r(problem.spec());
  k.residual(r.values());
  return r;
}

ScalarGrid energy_gradient(const ScalarGrid& u, const DiscreteProblem& problem) {
  Kernels k(problem);
  k.load_u(u.values());
  ScalarGrid g(problem.spec());
  k.gradient(g.values());
  return g;
}

double energy_difference(const ScalarGrid& u, const ScalarGrid& delta, const DiscreteProblem& problem) {
  Kernels k(problem);
  k.load_u(u.values());
  k.load_direction(delta.values());
  return k.energy_change(1.0);
}

MethodResult solve_newton(const VortexConfiguration& vc, const ConformalFactor& cf, const GridSpec& grid,
                          const SolveSettings& settings) {
  return run_ladder(vc, cf, grid, settings, newton_level);
}

MethodResult solve_minimize(const VortexConfiguration& vc, const ConformalFactor& cf, const GridSpec& grid,
                            const SolveSettings& settings) {
  return run_ladder(vc, cf, grid, settings, minimize_level);
}

SolveReport solve(const VortexConfiguration& vc, const ConformalFactor& cf, const GridSpec& grid,
                  const SolveSettings& settings, const ObservableOptions& options) {
  const auto t0 = Clock::now();
  grid.validate();
  settings.validate(grid.nodes);
  for (const GridSpec& spec : ladder(grid, settings)) require_clear_nodes(spec, vc);

  SolveReport report;
  report.settings = settings;
  ScalarGrid u(grid);

  if (vc.empty()) {
    // No vortices: the only admissible solution is u = 0; confirm the residual.
    const DiscreteProblem problem(vc, cf, grid);
    report.residual = residual(u, problem).max_abs();
    report.energy = discrete_energy(u, problem);
    report.converged = report.residual <= settings.residual_tol;
    if (!report.converged) report.message = "trivial solution failed the residual check";
  } else {
    if (settings.method != SolveMethod::minimize) report.newton = solve_newton(vc, cf, grid, settings);
    if (settings.method != SolveMethod::newton) report.minimize = solve_minimize(vc, cf, grid, settings);
    const MethodResult& primary = report.newton ? *report.newton : *report.minimize;
    report.converged = primary.converged;
    report.iterations = primary.iterations;
    report.residual = primary.residual;
    report.energy = primary.energy;
    report.message = primary.message;
    if (report.minimize) report.energy_history = report.minimize->energy_history;
    if (report.newton && report.minimize) {
      report.converged = report.newton->converged && report.minimize->converged;
      report.agreement = sup_distance(report.newton->u, report.minimize->u);
      report.methods_agree = *report.agreement <= settings.agreement_tol;
      if (!report.minimize->converged) report.message = report.minimize->message;
      if (report.converged && !report.methods_agree) report.message = "Newton and minimizer solutions disagree";
    }
    u = primary.u;
  }

  report.field = VortexField::from_regular_part(vc, cf, std::move(u));
  report.observables = compute_observables(report.field, options);
  report.wall_time = seconds_since(t0);
  return report;
}

}  // namespace csvortex
