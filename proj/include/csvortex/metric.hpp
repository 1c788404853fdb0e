#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace csvortex {

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

/// b ≡ 1.
struct FlatFamily {
  bool operator==(const FlatFamily&) const = default;
};

/// b = 1 + A exp(-|z - c|² / σ²).
struct GaussianBumpFamily {
  double amplitude = 0.0;
  double sigma = 1.0;
  Point center{};
  bool operator==(const GaussianBumpFamily&) const = default;
};

/// b = (1 + r²)^p with 0 <= p < 1. Unbounded above, so outside the
/// uniformly Euclidean class; covered by the growth-window condition.
struct PowerGrowthFamily {
  double exponent = 0.0;
  bool operator==(const PowerGrowthFamily&) const = default;
};

/// Radial profile b(r) given by samples, interpolated with a monotone
/// (Fritsch-Carlson) cubic. Queries beyond the last radius are an error.
class RadialTableFamily {
 public:
  RadialTableFamily() = default;
  RadialTableFamily(std::vector<double> radii, std::vector<double> values);

  const std::vector<double>& radii() const { return radii_; }
  const std::vector<double>& values() const { return values_; }
  double max_radius() const { return radii_.back(); }

  /// Value and derivative at r; throws RangeError outside [radii.front(), radii.back()].
  std::array<double, 2> value_and_slope(double r) const;

  bool operator==(const RadialTableFamily& o) const {
    return radii_ == o.radii_ && values_ == o.values_;
  }

 private:
  std::vector<double> radii_;
  std::vector<double> values_;
  std::vector<double> slopes_;
};

struct MetricBounds {
  double lower = 1.0;
  double upper = 1.0;
  bool uniformly_euclidean = true;
};

/// Conformal weight b(x, y) of the spatial metric γ_ij = b δ_ij.
/// Immutable; every member is safe to call concurrently.
class ConformalFactor {
 public:
  using Family = std::variant<FlatFamily, GaussianBumpFamily, PowerGrowthFamily, RadialTableFamily>;

  ConformalFactor() = default;
  explicit ConformalFactor(Family family);

  static ConformalFactor flat() { return ConformalFactor(FlatFamily{}); }
  static ConformalFactor gaussian_bump(double amplitude, double sigma, Point center = {});
  static ConformalFactor power_growth(double exponent);
  static ConformalFactor radial_table(std::vector<double> radii, std::vector<double> values);

  const Family& family() const { return family_; }
  std::string family_name() const;

  double evaluate(double x, double y) const;
  double evaluate(Point p) const { return evaluate(p.x, p.y); }
  /// Analytic gradient (∂x b, ∂y b).
  std::array<double, 2> gradient(double x, double y) const;

  /// Bounds of b over [-L, L]². Closed-form families are certified
  /// analytically; radial tables by their sample extrema.
  MetricBounds certify_bounds(double half_width) const;

  /// True when b depends only on |z| (about the origin).
  bool is_radial() const;
  /// b as a function of radius; requires is_radial().
  double radial_value(double r) const;
  /// lim b as |z| → ∞ when it exists and is finite.
  std::optional<double> asymptotic_value() const;

  /// Growth window b(r)·r <= c·r^{3-ε} for r >= 1. Returns {ε, c} for the
  /// families where the window exists (all except RadialTable, which has
  /// no behaviour at infinity).
  std::optional<std::array<double, 2>> growth_window() const;

  bool operator==(const ConformalFactor&) const = default;

 private:
  Family family_{FlatFamily{}};
};

}  // namespace csvortex
