#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "csvortex/metric.hpp"
#include "csvortex/vortex.hpp"

namespace csvortex {

/// Truncated square [-L, L]² cut into (N-1)² cells by an N-vertex lattice.
/// Field values live at cell centres x_i = -L + (i + 1/2)Δ, i = 0..N-2,
/// i.e. the vertex lattice staggered by (Δ/2, Δ/2); no node sits on the
/// origin or on any lattice vertex. The Dirichlet ghost ring sits at
/// indices -1 and N-1.
struct GridSpec {
  double half_width = 16.0;
  int nodes = 513;

  int cells() const { return nodes - 1; }
  double spacing() const { return 2.0 * half_width / (nodes - 1); }
  double coord(int i) const { return -half_width + (i + 0.5) * spacing(); }
  Point node(int i, int j) const { return {coord(i), coord(j)}; }

  /// Throws ConfigError unless N is odd, N >= 33 and L > 0.
  void validate() const;

  bool operator==(const GridSpec&) const = default;
};

/// Throws ConfigError if a vortex is not strictly inside the domain or
/// coincides with a grid node.
void require_clear_nodes(const GridSpec& spec, const VortexConfiguration& vc);

class ScalarGrid {
 public:
  ScalarGrid() = default;
  explicit ScalarGrid(const GridSpec& spec, double fill = 0.0);

  template <class F>
  static ScalarGrid sample(const GridSpec& spec, F&& f) {
    ScalarGrid g(spec);
    const int m = g.size();
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) g(i, j) = f(spec.node(i, j));
    return g;
  }

  const GridSpec& spec() const { return spec_; }
  /// Nodes per axis (N - 1).
  int size() const { return m_; }
  double spacing() const { return spec_.spacing(); }
  Point node(int i, int j) const { return spec_.node(i, j); }

  double& operator()(int i, int j) { return values_[static_cast<std::size_t>(j) * m_ + i]; }
  double operator()(int i, int j) const { return values_[static_cast<std::size_t>(j) * m_ + i]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  double max() const;
  double min() const;
  double max_abs() const;
  bool all_finite() const;

 private:
  GridSpec spec_{};
  int m_ = 0;
  std::vector<double> values_;
};

/// Dirichlet data at the ghost ring surrounding the grid.
class BoundaryRing {
 public:
  BoundaryRing() = default;
  static BoundaryRing zero(const GridSpec& spec);
  static BoundaryRing sample(const GridSpec& spec, const std::function<double(Point)>& f);

  const GridSpec& spec() const { return spec_; }
  /// Value at ghost index (i, j); at least one index must be -1 or N-1.
  double at(int i, int j) const;

 private:
  GridSpec spec_{};
  int m_ = 0;
  std::vector<double> bottom_, top_;  // i = -1..m, stored at i + 1
  std::vector<double> left_, right_;  // j = 0..m-1
};

/// Value of g at (i, j) with i, j in [-1, N-1], reading the ring outside the grid.
inline double padded(const ScalarGrid& g, const BoundaryRing& ring, int i, int j) {
  const int m = g.size();
  if (i < 0 || j < 0 || i >= m || j >= m) return ring.at(i, j);
  return g(i, j);
}

/// Five-point flat Laplacian; ghosts carry 0.
ScalarGrid laplacian0(const ScalarGrid& g);
/// Five-point flat Laplacian with the given Dirichlet ring.
ScalarGrid laplacian0(const ScalarGrid& g, const BoundaryRing& ring);

/// Central differences inside, second-order one-sided differences on the
/// outermost nodes. Returns (∂x g, ∂y g).
std::pair<ScalarGrid, ScalarGrid> gradient0(const ScalarGrid& g);

/// Midpoint rule Σ g·b·Δ² with a fixed, worker-independent summation order.
double integrate_metric(const ScalarGrid& g, const ConformalFactor& cf);
/// Same with b already sampled on the grid.
double integrate_metric(const ScalarGrid& g, const ScalarGrid& weight);
/// Σ g·Δ².
double integrate_flat(const ScalarGrid& g);

/// Tensor 4-point Lagrange interpolation. Points must lie between the ghost rings.
double sample_cubic(const ScalarGrid& g, const BoundaryRing& ring, Point p);
double sample_bilinear(const ScalarGrid& g, const BoundaryRing& ring, Point p);

/// Cubic transfer of g onto another grid over the same square.
ScalarGrid resample(const ScalarGrid& g, const BoundaryRing& ring, const GridSpec& target);

double sup_distance(const ScalarGrid& a, const ScalarGrid& b);

/// CSV dump with header "x,y,value", row-major (y outer), 17 significant digits.
void write_csv(const ScalarGrid& g, std::ostream& out);

}  // namespace csvortex
