#include "csvortex/metric.hpp"

#include <algorithm>
#include <cmath>

#include "csvortex/errors.hpp"

namespace csvortex {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_finite(double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y)) throw RangeError("metric evaluated at a non-finite point");
}

}  // namespace

RadialTableFamily::RadialTableFamily(std::vector<double> radii, std::vector<double> values)
    : radii_(std::move(radii)), values_(std::move(values)) {
  if (radii_.size() < 2 || radii_.size() != values_.size())
    throw ConfigError("metric.radii", "radial table needs at least two (radius, value) pairs of equal length");
  if (radii_.front() != 0.0) throw ConfigError("metric.radii", "radial table must start at r = 0");
  for (std::size_t i = 1; i < radii_.size(); ++i)
    if (!(radii_[i] > radii_[i - 1])) throw ConfigError("metric.radii", "radii must be strictly increasing");
  for (double v : values_)
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("metric.values", "table values must be positive");

  // Fritsch-Carlson slopes.
  const std::size_t n = radii_.size();
  std::vector<double> secant(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i)
    secant[i] = (values_[i + 1] - values_[i]) / (radii_[i + 1] - radii_[i]);
  slopes_.assign(n, 0.0);
  slopes_[n - 1] = secant[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (secant[i - 1] * secant[i] <= 0.0) {
      slopes_[i] = 0.0;
    } else {
      const double h0 = radii_[i] - radii_[i - 1];
      const double h1 = radii_[i + 1] - radii_[i];
      const double w1 = 2.0 * h1 + h0;
      const double w2 = h1 + 2.0 * h0;
      slopes_[i] = (w1 + w2) / (w1 / secant[i - 1] + w2 / secant[i]);
    }
  }
  // Smooth at the origin: b'(0) = 0.
  slopes_[0] = 0.0;
}

std::array<double, 2> RadialTableFamily::value_and_slope(double r) const {
  if (!(r >= radii_.front()) || r > radii_.back())
    throw RangeError("radial table queried at r = " + std::to_string(r) + " beyond its range [0, " +
                     std::to_string(radii_.back()) + "]");
  auto it = std::upper_bound(radii_.begin(), radii_.end(), r);
  std::size_t i = static_cast<std::size_t>(std::distance(radii_.begin(), it));
  i = std::clamp<std::size_t>(i, 1, radii_.size() - 1) - 1;
  const double h = radii_[i + 1] - radii_[i];
  const double t = (r - radii_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  const double value = h00 * values_[i] + h10 * h * slopes_[i] + h01 * values_[i + 1] + h11 * h * slopes_[i + 1];
  const double d00 = 6 * t2 - 6 * t, d10 = 3 * t2 - 4 * t + 1;
  const double d01 = -6 * t2 + 6 * t, d11 = 3 * t2 - 2 * t;
  const double slope = (d00 * values_[i] + d01 * values_[i + 1]) / h + d10 * slopes_[i] + d11 * slopes_[i + 1];
  return {value, slope};
}

ConformalFactor::ConformalFactor(Family family) : family_(std::move(family)) {
  std::visit(overloaded{
                 [](const FlatFamily&) {},
                 [](const GaussianBumpFamily& g) {
                   if (!(g.amplitude >= 0.0) || !std::isfinite(g.amplitude))
                     throw ConfigError("metric.amplitude", "must be a finite value >= 0");
                   if (!(g.sigma > 0.0) || !std::isfinite(g.sigma))
                     throw ConfigError("metric.sigma", "must be a finite value > 0");
                   if (!std::isfinite(g.center.x) || !std::isfinite(g.center.y))
                     throw ConfigError("metric.center", "must be finite");
                 },
                 [](const PowerGrowthFamily& p) {
                   if (!(p.exponent >= 0.0 && p.exponent < 1.0))
                     throw ConfigError("metric.exponent", "must lie in [0, 1)");
                 },
                 [](const RadialTableFamily&) {},
             },
             family_);
}

ConformalFactor ConformalFactor::gaussian_bump(double amplitude, double sigma, Point center) {
  return ConformalFactor(GaussianBumpFamily{amplitude, sigma, center});
}

ConformalFactor ConformalFactor::power_growth(double exponent) {
  return ConformalFactor(PowerGrowthFamily{exponent});
}

ConformalFactor ConformalFactor::radial_table(std::vector<double> radii, std::vector<double> values) {
  return ConformalFactor(RadialTableFamily(std::move(radii), std::move(values)));
}

std::string ConformalFactor::family_name() const {
  return std::visit(overloaded{
                        [](const FlatFamily&) { return std::string("flat"); },
                        [](const GaussianBumpFamily&) { return std::string("gaussian_bump"); },
                        [](const PowerGrowthFamily&) { return std::string("power_growth"); },
                        [](const RadialTableFamily&) { return std::string("radial_table"); },
                    },
                    family_);
}

double ConformalFactor::evaluate(double x, double y) const {
  require_finite(x, y);
  return std::visit(overloaded{
                        [](const FlatFamily&) { return 1.0; },
                        [&](const GaussianBumpFamily& g) {
                          const double dx = x - g.center.x, dy = y - g.center.y;
                          return 1.0 + g.amplitude * std::exp(-(dx * dx + dy * dy) / (g.sigma * g.sigma));
                        },
                        [&](const PowerGrowthFamily& p) { return std::pow(1.0 + x * x + y * y, p.exponent); },
                        [&](const RadialTableFamily& t) { return t.value_and_slope(std::hypot(x, y))[0]; },
                    },
                    family_);
}

std::array<double, 2> ConformalFactor::gradient(double x, double y) const {
  require_finite(x, y);
  return std::visit(
      overloaded{
          [](const FlatFamily&) { return std::array<double, 2>{0.0, 0.0}; },
          [&](const GaussianBumpFamily& g) {
            const double dx = x - g.center.x, dy = y - g.center.y, s2 = g.sigma * g.sigma;
            const double f = -2.0 * g.amplitude * std::exp(-(dx * dx + dy * dy) / s2) / s2;
            return std::array<double, 2>{f * dx, f * dy};
          },
          [&](const PowerGrowthFamily& p) {
            const double q = 1.0 + x * x + y * y;
            const double f = 2.0 * p.exponent * std::pow(q, p.exponent - 1.0);
            return std::array<double, 2>{f * x, f * y};
          },
          [&](const RadialTableFamily& t) {
            const double r = std::hypot(x, y);
            if (r == 0.0) return std::array<double, 2>{0.0, 0.0};
            const double slope = t.value_and_slope(r)[1];
            return std::array<double, 2>{slope * x / r, slope * y / r};
          },
      },
      family_);
}

MetricBounds ConformalFactor::certify_bounds(double half_width) const {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) throw RangeError("domain half width must be positive");
  return std::visit(overloaded{
                        [](const FlatFamily&) { return MetricBounds{1.0, 1.0, true}; },
                        [](const GaussianBumpFamily& g) { return MetricBounds{1.0, 1.0 + g.amplitude, true}; },
                        [&](const PowerGrowthFamily& p) {
                          // Radially increasing; the corner of the square is the farthest point.
                          const double upper = std::pow(1.0 + 2.0 * half_width * half_width, p.exponent);
                          return MetricBounds{1.0, upper, p.exponent == 0.0};
                        },
                        [&](const RadialTableFamily& t) {
                          if (t.max_radius() < std::sqrt(2.0) * half_width)
                            throw RangeError("radial table does not cover the domain corners");
                          const auto [lo, hi] = std::minmax_element(t.values().begin(), t.values().end());
                          return MetricBounds{*lo, *hi, true};
                        },
                    },
                    family_);
}

bool ConformalFactor::is_radial() const {
  if (const auto* g = std::get_if<GaussianBumpFamily>(&family_))
    return g->amplitude == 0.0 || (g->center.x == 0.0 && g->center.y == 0.0);
  return true;
}

double ConformalFactor::radial_value(double r) const {
  if (!is_radial()) throw RangeError("metric is not radial about the origin");
  return evaluate(r, 0.0);
}

std::optional<double> ConformalFactor::asymptotic_value() const {
  return std::visit(overloaded{
                        [](const FlatFamily&) -> std::optional<double> { return 1.0; },
                        [](const GaussianBumpFamily&) -> std::optional<double> { return 1.0; },
                        [](const PowerGrowthFamily& p) -> std::optional<double> {
                          if (p.exponent == 0.0) return 1.0;
                          return std::nullopt;
                        },
                        [](const RadialTableFamily&) -> std::optional<double> { return std::nullopt; },
                    },
                    family_);
}

std::optional<std::array<double, 2>> ConformalFactor::growth_window() const {
  return std::visit(overloaded{
                        // Bounded b: b·r <= a2·r = a2·r^{3-2}.
                        [](const FlatFamily&) -> std::optional<std::array<double, 2>> {
                          return std::array<double, 2>{2.0, 1.0};
                        },
                        [](const GaussianBumpFamily& g) -> std::optional<std::array<double, 2>> {
                          return std::array<double, 2>{2.0, 1.0 + g.amplitude};
                        },
                        // (1+r²)^p <= (2r²)^p for r >= 1, so b·r <= 2^p r^{1+2p} = 2^p r^{3-ε}, ε = 2(1-p).
                        [](const PowerGrowthFamily& p) -> std::optional<std::array<double, 2>> {
                          return std::array<double, 2>{2.0 * (1.0 - p.exponent), std::pow(2.0, p.exponent)};
                        },
                        [](const RadialTableFamily&) -> std::optional<std::array<double, 2>> {
                          return std::nullopt;
                        },
                    },
                    family_);
}

}  // namespace csvortex
