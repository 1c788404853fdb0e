#pragma once

#include <optional>
#include <string>
#include <vector>

#include "csvortex/grid.hpp"
#include "csvortex/metric.hpp"
#include "csvortex/observables.hpp"
#include "csvortex/vortex.hpp"

namespace csvortex {

enum class SolveMethod { minimize, newton, both };

std::string to_string(SolveMethod m);
SolveMethod parse_solve_method(const std::string& name);

struct SolveSettings {
  SolveMethod method = SolveMethod::both;
  /// Stop when the max-norm of the residual of Δu = Be^u(Be^u - 1) + h drops below this.
  double residual_tol = 1e-10;
  /// Newton iterations per continuation level.
  int max_iterations = 200;
  /// Minimizer line-search steps per continuation level.
  int max_gradient_steps = 50000;
  /// Strictly increasing node counts; the last one must equal the grid's.
  /// Empty means a single level on the target grid.
  std::vector<int> continuation;
  double backtrack = 0.5;
  double armijo = 1e-4;
  /// Required sup-norm agreement of the two methods on u.
  double agreement_tol = 1e-6;

  void validate(int target_nodes) const;
  bool operator==(const SolveSettings&) const = default;
};

/// Distances from a vortex over which the source blends from h0 to -Δ0 u0.
inline constexpr double kSourceBlend[2] = {1.0, 4.0};

/// 1 - Π_k (1 - s(d_k)) with s a C² step from 1 at distance kSourceBlend[0]
/// to 0 at kSourceBlend[1]; 1 near cores, 0 far away. 0 without vortices.
double core_weight(const VortexConfiguration& vc, Point p);

/// Background fields sampled on one grid, with the Dirichlet ring for u
/// chosen so that w = u0 + u vanishes on the ghost ring.
class DiscreteProblem {
 public:
  DiscreteProblem(VortexConfiguration vc, ConformalFactor cf, GridSpec spec);

  const VortexConfiguration& vortices() const { return vc_; }
  const ConformalFactor& metric() const { return cf_; }
  const GridSpec& spec() const { return spec_; }

  const ScalarGrid& b() const { return b_; }
  /// Source term χh0 + (1 - χ)(-Δ0 u0) with χ = core_weight and the
  /// five-point Δ0 reading u0 on the ring.
  const ScalarGrid& h0() const { return h0_; }
  /// B = e^{u0}.
  const ScalarGrid& weight() const { return weight_; }
  const ScalarGrid& u0() const { return u0_; }
  const BoundaryRing& ring() const { return ring_; }

 private:
  VortexConfiguration vc_;
  ConformalFactor cf_;
  GridSpec spec_;
  ScalarGrid b_, h0_, weight_, u0_;
  BoundaryRing ring_;
};

/// Terms of E(u) = ∫ |∇u|² + (Be^u - 1)² + 2hu dV_γ. The Dirichlet term is
/// the flat edge sum Σ (u_p - u_q)² over lattice edges, ghost edges included,
/// whose gradient is exactly the five-point Laplacian.
struct EnergyParts {
  double dirichlet = 0.0;
  double potential = 0.0;
  double source = 0.0;
  double total() const { return dirichlet + potential + source; }
};

EnergyParts discrete_energy_parts(const ScalarGrid& u, const DiscreteProblem& problem);
double discrete_energy(const ScalarGrid& u, const DiscreteProblem& problem);

/// r = Δ0 u / b - (Be^u(Be^u - 1) + h). Throws NumericalError if u > 50 anywhere.
ScalarGrid residual(const ScalarGrid& u, const DiscreteProblem& problem);

/// ∂E/∂u_p = -2 b_p r_p Δ².
ScalarGrid energy_gradient(const ScalarGrid& u, const DiscreteProblem& problem);

/// E(u + δ) - E(u), summed from local differences so it stays accurate when
/// the change is far below the rounding level of E itself. δ vanishes on the ring.
double energy_difference(const ScalarGrid& u, const ScalarGrid& delta, const DiscreteProblem& problem);

struct LevelRecord {
  int nodes = 0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

struct MethodResult {
  bool converged = false;
  int iterations = 0;  // summed over levels
  double residual = 0.0;
  double energy = 0.0;
  /// Minimizer: E after each accepted step on the finest level, starting with E(u_init).
  std::vector<double> energy_history;
  std::vector<LevelRecord> levels;
  double wall_time = 0.0;
  std::string message;
  ScalarGrid u;
};

MethodResult solve_newton(const VortexConfiguration& vc, const ConformalFactor& cf, const GridSpec& grid,
                          const SolveSettings& settings);
MethodResult solve_minimize(const VortexConfiguration& vc, const ConformalFactor& cf, const GridSpec& grid,
                            const SolveSettings& settings);

struct SolveReport {
  bool converged = false;
  std::string message;
  int iterations = 0;
  double residual = 0.0;
  double energy = 0.0;
  std::vector<double> energy_history;
  double wall_time = 0.0;

  std::optional<MethodResult> newton;
  std::optional<MethodResult> minimize;
  /// sup |u_newton - u_minimize| when both ran.
  std::optional<double> agreement;
  bool methods_agree = true;

  VortexField field;
  ObservableSet observables;

  SolveSettings settings;
};

/// Solves for u on `grid`, reconstructs w = u0 + u and evaluates the observables.
/// Throws ConfigError for vortices outside the domain or on a node.
SolveReport solve(const VortexConfiguration& vc, const ConformalFactor& cf, const GridSpec& grid,
                  const SolveSettings& settings, const ObservableOptions& options = {});

}  // namespace csvortex
