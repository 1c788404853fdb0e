#include <doctest.h>

#include <cmath>
#include <sstream>

#include "csvortex/errors.hpp"
#include "csvortex/grid.hpp"

using namespace csvortex;

TEST_CASE("layout is symmetric and avoids the origin") {
  const GridSpec spec{16.0, 513};
  CHECK(spec.cells() == 512);
  CHECK(spec.spacing() == doctest::Approx(1.0 / 16));
  CHECK(spec.coord(0) == doctest::Approx(-16 + 1.0 / 32));
  for (int i = 0; i < spec.cells(); ++i) {
    CHECK(spec.coord(i) == doctest::Approx(-spec.coord(spec.cells() - 1 - i)));
    CHECK(spec.coord(i) != 0.0);
  }
}

TEST_CASE("spec validation") {
  auto path_of = [](GridSpec g) -> std::string {
    try {
      g.validate();
    } catch (const ConfigError& e) {
      return e.path();
    }
    return "";
  };
  CHECK(path_of({16.0, 512}) == "grid.nodes");
  CHECK(path_of({16.0, 31}) == "grid.nodes");
  CHECK(path_of({0.0, 129}) == "grid.half_width");
  CHECK(path_of({16.0, 129}).empty());
}

TEST_CASE("vortex placement checks") {
  const GridSpec spec{16.0, 129};
  try {
    require_clear_nodes(spec, VortexConfiguration({{{20.0, 0.0}, 1}}));
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("vortex outside domain") != std::string::npos);
  }
  const Point node = spec.node(10, 20);
  CHECK_THROWS_WITH_AS(require_clear_nodes(spec, VortexConfiguration({{node, 1}})),
                       doctest::Contains("coincides with a grid node"), ConfigError);
  CHECK_NOTHROW(require_clear_nodes(spec, VortexConfiguration({{{0.0, 0.0}, 1}})));
}

TEST_CASE("midpoint quadrature is exact for the area") {
  const GridSpec spec{5.0, 65};
  CHECK(integrate_flat(ScalarGrid(spec, 1.0)) == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(integrate_metric(ScalarGrid(spec, 1.0), ConformalFactor::flat()) == doctest::Approx(100.0).epsilon(1e-14));
}

TEST_CASE("five-point Laplacian and gradient on quadratics") {
  const GridSpec spec{2.0, 33};
  auto f = [](Point p) { return 3 * p.x * p.x - p.x * p.y + 2 * p.y * p.y + p.x; };
  const ScalarGrid g = ScalarGrid::sample(spec, f);
  const BoundaryRing ring = BoundaryRing::sample(spec, f);
  const ScalarGrid lap = laplacian0(g, ring);
  for (double v : lap.values()) CHECK(v == doctest::Approx(10.0).epsilon(1e-9));
  const auto [gx, gy] = gradient0(g);
  for (int j = 0; j < g.size(); ++j)
    for (int i = 0; i < g.size(); ++i) {
      const Point p = spec.node(i, j);
      CHECK(gx(i, j) == doctest::Approx(6 * p.x - p.y + 1).epsilon(1e-9).scale(1));
      CHECK(gy(i, j) == doctest::Approx(-p.x + 4 * p.y).epsilon(1e-9).scale(1));
    }
}

TEST_CASE("Green identity with zero ring") {
  const GridSpec spec{3.0, 65};
  const ScalarGrid g = ScalarGrid::sample(spec, [](Point p) { return std::cos(p.x) * std::exp(-p.y * p.y); });
  const ScalarGrid lap = laplacian0(g);
  // Σ g Δh g Δ² = -Σ_edges (g_p - g_q)² with ghosts 0.
  double lhs = 0.0, edges = 0.0;
  const int m = g.size();
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) lhs += g(i, j) * lap(i, j);
  auto at = [&](int i, int j) { return (i < 0 || j < 0 || i >= m || j >= m) ? 0.0 : g(i, j); };
  for (int j = -1; j < m; ++j)
    for (int i = -1; i < m; ++i) {
      if (j >= 0) edges += std::pow(at(i + 1, j) - at(i, j), 2);
      if (i >= 0) edges += std::pow(at(i, j + 1) - at(i, j), 2);
    }
  CHECK(lhs * spec.spacing() * spec.spacing() == doctest::Approx(-edges).epsilon(1e-12));
}

TEST_CASE("cubic interpolation reproduces cubics") {
  const GridSpec spec{4.0, 33};
  auto f = [](Point p) { return p.x * p.x * p.x - 2 * p.x * p.y * p.y + p.y + 0.5; };
  const ScalarGrid g = ScalarGrid::sample(spec, f);
  const BoundaryRing ring = BoundaryRing::sample(spec, f);
  for (double x = -3.9; x < 3.9; x += 0.37)
    for (double y = -3.9; y < 3.9; y += 0.41) CHECK(sample_cubic(g, ring, {x, y}) == doctest::Approx(f({x, y})));
  const auto bil = [](Point p) { return 2 * p.x - p.y + 3 * p.x * p.y; };
  const ScalarGrid b = ScalarGrid::sample(spec, bil);
  const BoundaryRing bring = BoundaryRing::sample(spec, bil);
  CHECK(sample_bilinear(b, bring, {0.3, -1.7}) == doctest::Approx(bil({0.3, -1.7})));
  const ScalarGrid fine = resample(g, ring, {4.0, 65});
  CHECK(fine(10, 40) == doctest::Approx(f(fine.node(10, 40))));
  CHECK_THROWS_AS(sample_cubic(g, ring, {5.0, 0.0}), RangeError);
}

TEST_CASE("extrema, distances, csv") {
  const GridSpec spec{1.0, 33};
  ScalarGrid a(spec, 0.0), b(spec, 0.0);
  b(3, 4) = -2.5;
  CHECK(b.min() == -2.5);
  CHECK(b.max() == 0.0);
  CHECK(b.max_abs() == 2.5);
  CHECK(sup_distance(a, b) == 2.5);
  CHECK_THROWS_AS(sup_distance(a, ScalarGrid({1.0, 65})), RangeError);
  std::ostringstream out;
  write_csv(a, out);
  const std::string text = out.str();
  CHECK(text.rfind("x,y,value\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 32 * 32);
  CHECK(BoundaryRing::zero(spec).at(-1, 5) == 0.0);
  CHECK_THROWS_AS(BoundaryRing::zero(spec).at(3, 3), RangeError);
}
