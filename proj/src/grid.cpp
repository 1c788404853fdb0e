#include "csvortex/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "csvortex/errors.hpp"
#include "csvortex/parallel.hpp"

namespace csvortex {

void GridSpec::validate() const {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) throw ConfigError("grid.half_width", "must be > 0");
  if (nodes < 33 || nodes % 2 == 0) throw ConfigError("grid.nodes", "must be an odd integer >= 33");
}

void require_clear_nodes(const GridSpec& spec, const VortexConfiguration& vc) {
  const double L = spec.half_width, d = spec.spacing();
  for (std::size_t k = 0; k < vc.sites().size(); ++k) {
    const Point z = vc.sites()[k].location;
    if (!(std::fabs(z.x) < L && std::fabs(z.y) < L))
      throw ConfigError("vortices[" + std::to_string(k) + "]", "vortex outside domain");
    const double tx = (z.x + L) / d - 0.5, ty = (z.y + L) / d - 0.5;
    if (std::fabs(tx - std::round(tx)) < 1e-9 && std::fabs(ty - std::round(ty)) < 1e-9)
      throw ConfigError("vortices[" + std::to_string(k) + "]", "vortex coincides with a grid node");
  }
}

ScalarGrid::ScalarGrid(const GridSpec& spec, double fill)
    : spec_(spec), m_(spec.cells()), values_(static_cast<std::size_t>(m_) * m_, fill) {}

double ScalarGrid::max() const { return *std::max_element(values_.begin(), values_.end()); }
double ScalarGrid::min() const { return *std::min_element(values_.begin(), values_.end()); }

double ScalarGrid::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::fabs(v));
  return m;
}

bool ScalarGrid::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

BoundaryRing BoundaryRing::zero(const GridSpec& spec) {
  return sample(spec, [](Point) { return 0.0; });
}

BoundaryRing BoundaryRing::sample(const GridSpec& spec, const std::function<double(Point)>& f) {
  BoundaryRing r;
  r.spec_ = spec;
  r.m_ = spec.cells();
  const int m = r.m_;
  r.bottom_.resize(m + 2);
  r.top_.resize(m + 2);
  r.left_.resize(m);
  r.right_.resize(m);
  for (int i = -1; i <= m; ++i) {
    r.bottom_[i + 1] = f(spec.node(i, -1));
    r.top_[i + 1] = f(spec.node(i, m));
  }
  for (int j = 0; j < m; ++j) {
    r.left_[j] = f(spec.node(-1, j));
    r.right_[j] = f(spec.node(m, j));
  }
  return r;
}

double BoundaryRing::at(int i, int j) const {
  if (j == -1) return bottom_[i + 1];
  if (j == m_) return top_[i + 1];
  if (i == -1) return left_[j];
  if (i == m_) return right_[j];
  throw RangeError("boundary ring queried at an interior index");
}

ScalarGrid laplacian0(const ScalarGrid& g) { return laplacian0(g, BoundaryRing::zero(g.spec())); }

ScalarGrid laplacian0(const ScalarGrid& g, const BoundaryRing& ring) {
  ScalarGrid out(g.spec());
  const int m = g.size();
  const double inv = 1.0 / (g.spacing() * g.spacing());
  for_rows(m, [&](int j) {
    for (int i = 0; i < m; ++i) {
      const double c = g(i, j);
      const double sum = padded(g, ring, i - 1, j) + padded(g, ring, i + 1, j) + padded(g, ring, i, j - 1) +
                         padded(g, ring, i, j + 1);
      out(i, j) = (sum - 4.0 * c) * inv;
    }
  });
  return out;
}

std::pair<ScalarGrid, ScalarGrid> gradient0(const ScalarGrid& g) {
  ScalarGrid gx(g.spec()), gy(g.spec());
  const int m = g.size();
  const double h = g.spacing();
  for_rows(m, [&](int j) {
    for (int i = 0; i < m; ++i) {
      if (i == 0)
        gx(i, j) = (-3.0 * g(0, j) + 4.0 * g(1, j) - g(2, j)) / (2.0 * h);
      else if (i == m - 1)
        gx(i, j) = (3.0 * g(m - 1, j) - 4.0 * g(m - 2, j) + g(m - 3, j)) / (2.0 * h);
      else
        gx(i, j) = (g(i + 1, j) - g(i - 1, j)) / (2.0 * h);
      if (j == 0)
        gy(i, j) = (-3.0 * g(i, 0) + 4.0 * g(i, 1) - g(i, 2)) / (2.0 * h);
      else if (j == m - 1)
        gy(i, j) = (3.0 * g(i, m - 1) - 4.0 * g(i, m - 2) + g(i, m - 3)) / (2.0 * h);
      else
        gy(i, j) = (g(i, j + 1) - g(i, j - 1)) / (2.0 * h);
    }
  });
  return {std::move(gx), std::move(gy)};
}

double integrate_metric(const ScalarGrid& g, const ConformalFactor& cf) {
  return integrate_metric(g, ScalarGrid::sample(g.spec(), [&](Point p) { return cf.evaluate(p); }));
}

double integrate_metric(const ScalarGrid& g, const ScalarGrid& weight) {
  const int m = g.size();
  const double area = g.spacing() * g.spacing();
  return area * reduce_rows(m, [&](int j) {
           CompensatedSum s;
           for (int i = 0; i < m; ++i) s.add(g(i, j) * weight(i, j));
           return s.value();
         });
}

double integrate_flat(const ScalarGrid& g) {
  const int m = g.size();
  const double area = g.spacing() * g.spacing();
  return area * reduce_rows(m, [&](int j) {
           CompensatedSum s;
           for (int i = 0; i < m; ++i) s.add(g(i, j));
           return s.value();
         });
}

namespace {

struct Stencil {
  int start;
  double weight[4];
};

double fractional_index(const GridSpec& spec, double x) {
  const double t = (x + spec.half_width) / spec.spacing() - 0.5;
  if (!(t >= -1.0 && t <= spec.cells())) throw RangeError("interpolation point outside the ghost ring");
  return t;
}

Stencil cubic_stencil(const GridSpec& spec, double x) {
  const double t = fractional_index(spec, x);
  const int m = spec.cells();
  const int s = std::clamp(static_cast<int>(std::floor(t)) - 1, -1, m - 3);
  Stencil st{s, {}};
  for (int a = 0; a < 4; ++a) {
    double w = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != a) w *= (t - (s + b)) / static_cast<double>(a - b);
    st.weight[a] = w;
  }
  return st;
}

}  // namespace

double sample_cubic(const ScalarGrid& g, const BoundaryRing& ring, Point p) {
  const Stencil sx = cubic_stencil(g.spec(), p.x), sy = cubic_stencil(g.spec(), p.y);
  double v = 0.0;
  for (int b = 0; b < 4; ++b) {
    double row = 0.0;
    for (int a = 0; a < 4; ++a) row += sx.weight[a] * padded(g, ring, sx.start + a, sy.start + b);
    v += sy.weight[b] * row;
  }
  return v;
}

double sample_bilinear(const ScalarGrid& g, const BoundaryRing& ring, Point p) {
  const int m = g.size();
  const double tx = fractional_index(g.spec(), p.x), ty = fractional_index(g.spec(), p.y);
  const int i = std::clamp(static_cast<int>(std::floor(tx)), -1, m - 1);
  const int j = std::clamp(static_cast<int>(std::floor(ty)), -1, m - 1);
  const double fx = tx - i, fy = ty - j;
  return (1 - fx) * (1 - fy) * padded(g, ring, i, j) + fx * (1 - fy) * padded(g, ring, i + 1, j) +
         (1 - fx) * fy * padded(g, ring, i, j + 1) + fx * fy * padded(g, ring, i + 1, j + 1);
}

ScalarGrid resample(const ScalarGrid& g, const BoundaryRing& ring, const GridSpec& target) {
  if (target.half_width != g.spec().half_width) throw RangeError("resample requires the same domain");
  ScalarGrid out(target);
  const int m = out.size();
  for_rows(m, [&](int j) {
    for (int i = 0; i < m; ++i) out(i, j) = sample_cubic(g, ring, target.node(i, j));
  });
  return out;
}

double sup_distance(const ScalarGrid& a, const ScalarGrid& b) {
  if (!(a.spec() == b.spec())) throw RangeError("grids do not conform");
  double d = 0.0;
  for (std::size_t k = 0; k < a.values().size(); ++k) d = std::max(d, std::fabs(a.values()[k] - b.values()[k]));
  return d;
}

void write_csv(const ScalarGrid& g, std::ostream& out) {
  out << "x,y,value\n";
  char buf[96];
  const int m = g.size();
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      const Point p = g.node(i, j);
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.x, p.y, g(i, j));
      out << buf;
    }
}

}  // namespace csvortex
