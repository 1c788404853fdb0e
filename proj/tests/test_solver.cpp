#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "csvortex/errors.hpp"
#include "csvortex/parallel.hpp"
#include "csvortex/solver.hpp"

using namespace csvortex;

namespace {

ScalarGrid smooth_field(const GridSpec& spec, double amplitude, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const double L = spec.half_width;
  double a[3][3];
  for (auto& row : a)
    for (double& v : row) v = coef(rng);
  return ScalarGrid::sample(spec, [&](Point p) {
    double s = 0.0;
    for (int k = 1; k <= 3; ++k)
      for (int l = 1; l <= 3; ++l)
        s += a[k - 1][l - 1] * std::sin(k * std::numbers::pi * (p.x + L) / (2 * L)) *
             std::sin(l * std::numbers::pi * (p.y + L) / (2 * L));
    return amplitude * s;
  });
}

SolveSettings quick(SolveMethod method) {
  SolveSettings s;
  s.method = method;
  return s;
}

}  // namespace

TEST_CASE("settings validation") {
  SolveSettings s;
  s.continuation = {129, 257, 513};
  CHECK_NOTHROW(s.validate(513));
  CHECK_THROWS_AS(s.validate(257), ConfigError);
  s.continuation = {257, 129, 513};
  CHECK_THROWS_AS(s.validate(513), ConfigError);
  s.continuation = {};
  s.residual_tol = 0.0;
  CHECK_THROWS_WITH_AS(s.validate(513), doctest::Contains("solver.residual_tol"), ConfigError);
  CHECK(parse_solve_method("newton") == SolveMethod::newton);
  CHECK(to_string(SolveMethod::both) == "both");
  CHECK_THROWS_AS(parse_solve_method("gradient"), ConfigError);
}

TEST_CASE("ring makes w vanish on the ghost ring") {
  const VortexConfiguration vc({{{0.3, -0.2}, 2}}, 4.0);
  const DiscreteProblem p(vc, ConformalFactor::flat(), {8.0, 65});
  const GridSpec& s = p.spec();
  for (int i = -1; i <= s.cells(); ++i) {
    const double x = -s.half_width + (i + 0.5) * s.spacing();
    const double y = -s.half_width - 0.5 * s.spacing();
    CHECK(p.ring().at(i, -1) + eval_u0(vc, {x, y}) == doctest::Approx(0.0).scale(1e-12));
  }
  CHECK(p.weight()(5, 7) == doctest::Approx(std::exp(p.u0()(5, 7))));
}

TEST_CASE("source equals h0 near cores and -Δh u0 far away") {
  const VortexConfiguration vc({{{0.0, 0.0}, 1}});
  const DiscreteProblem p(vc, ConformalFactor::flat(), {8.0, 129});
  const GridSpec& s = p.spec();
  const int c = s.cells() / 2;
  CHECK(p.h0()(c, c) == eval_h0(vc, s.node(c, c)));
  CHECK(core_weight(vc, {0.5, 0.0}) == 1.0);
  CHECK(core_weight(vc, {4.5, 0.0}) == 0.0);
  const ScalarGrid lap = laplacian0(p.u0(), [&] {
    return BoundaryRing::sample(s, [&](Point q) { return eval_u0(vc, q); });
  }());
  CHECK(p.h0()(c + 50, c) == doctest::Approx(-lap(c + 50, c)).epsilon(1e-12));
  CHECK(p.h0()(c + 50, c) == doctest::Approx(eval_h0(vc, s.node(c + 50, c))).epsilon(1e-2));
}

TEST_CASE("energy potential part at u = 0") {
  // ∫ over [-16,16]² of 1/(1+r²)² = 3.1315836028029995
  const DiscreteProblem p(VortexConfiguration({{{0.0, 0.0}, 1}}), ConformalFactor::flat(), {16.0, 513});
  const EnergyParts e = discrete_energy_parts(ScalarGrid(p.spec()), p);
  CHECK(e.potential == doctest::Approx(3.1315836028029995).epsilon(1e-6));
  CHECK(e.source == 0.0);
}

TEST_CASE("gradient is the derivative of the discrete energy") {
  const VortexConfiguration vc({{{0.4, -0.3}, 1}, {{-1.1, 0.9}, 2}}, 2.0);
  const DiscreteProblem p(vc, ConformalFactor::gaussian_bump(1.0, 2.0), {4.0, 33});
  ScalarGrid u = smooth_field(p.spec(), 0.3, 5);
  const ScalarGrid g = energy_gradient(u, p);
  const ScalarGrid r = residual(u, p);
  const double h2 = p.spec().spacing() * p.spec().spacing();
  std::mt19937 rng(1);
  std::uniform_int_distribution<int> idx(0, p.spec().cells() - 1);
  for (int k = 0; k < 40; ++k) {
    const int i = idx(rng), j = idx(rng);
    const double eps = 1e-5, keep = u(i, j);
    u(i, j) = keep + eps;
    const double ep = discrete_energy(u, p);
    u(i, j) = keep - eps;
    const double em = discrete_energy(u, p);
    u(i, j) = keep;
    CHECK(g(i, j) == doctest::Approx((ep - em) / (2 * eps)).epsilon(1e-6).scale(1e-9));
    CHECK(g(i, j) == doctest::Approx(-2.0 * p.b()(i, j) * r(i, j) * h2).epsilon(1e-10));
  }
}

TEST_CASE("energy difference is accurate for small and large steps") {
  const VortexConfiguration vc({{{0.2, 0.1}, 1}});
  const DiscreteProblem p(vc, ConformalFactor::flat(), {4.0, 65});
  const ScalarGrid u = smooth_field(p.spec(), 0.5, 9);
  for (double amp : {1e-1, 1e-3}) {
    const ScalarGrid d = smooth_field(p.spec(), amp, 21);
    ScalarGrid moved = u;
    for (std::size_t k = 0; k < moved.values().size(); ++k) moved.values()[k] += d.values()[k];
    CHECK(energy_difference(u, d, p) ==
          doctest::Approx(discrete_energy(moved, p) - discrete_energy(u, p)).epsilon(1e-8));
  }
  // Far below the rounding level of E: linear term dominates.
  const ScalarGrid tiny = smooth_field(p.spec(), 1e-12, 21);
  const ScalarGrid g = energy_gradient(u, p);
  double linear = 0.0;
  for (std::size_t k = 0; k < tiny.values().size(); ++k) linear += g.values()[k] * tiny.values()[k];
  CHECK(energy_difference(u, tiny, p) == doctest::Approx(linear).epsilon(1e-6));
}

TEST_CASE("overflow guard") {
  const DiscreteProblem p(VortexConfiguration({{{0.0, 0.0}, 1}}), ConformalFactor::flat(), {4.0, 33});
  ScalarGrid u(p.spec(), 0.0);
  u(3, 3) = 51.0;
  CHECK_THROWS_AS(residual(u, p), NumericalError);
}

TEST_CASE("Newton and minimizer agree on a small grid") {
  const VortexConfiguration vc({{{0.6, -0.4}, 2}});
  const auto cf = ConformalFactor::gaussian_bump(1.0, 2.0);
  SolveSettings s = quick(SolveMethod::both);
  s.continuation = {65, 129};
  const SolveReport r = solve(vc, cf, {8.0, 129}, s);
  REQUIRE(r.converged);
  REQUIRE(r.agreement);
  CHECK(*r.agreement <= 1e-8);
  CHECK(r.methods_agree);
  CHECK(r.residual <= 1e-10);
  REQUIRE(r.newton);
  REQUIRE(r.minimize);
  CHECK(r.newton->levels.size() == 2);
  const auto& hist = r.minimize->energy_history;
  REQUIRE(hist.size() >= 2);
  for (std::size_t k = 1; k < hist.size(); ++k) CHECK(hist[k] <= hist[k - 1]);
  CHECK(r.observables.w_max <= 1e-8);
  // E(u*) is a minimum.
  const DiscreteProblem p(vc, cf, {8.0, 129});
  for (unsigned seed = 0; seed < 10; ++seed)
    CHECK(energy_difference(r.field.u, smooth_field(p.spec(), 1e-3, seed), p) >= -1e-12);
}

TEST_CASE("no vortices returns the trivial solution") {
  const SolveReport r = solve(VortexConfiguration(), ConformalFactor::gaussian_bump(1.0, 2.0), {8.0, 65}, {});
  CHECK(r.converged);
  CHECK(r.field.u.max_abs() == 0.0);
  CHECK_FALSE(r.newton);
  CHECK(r.observables.flux == 0.0);
  CHECK(r.observables.energy == 0.0);
}

TEST_CASE("misplaced vortices are rejected before solving") {
  SolveSettings s;
  s.continuation = {65, 129};
  const Point node = GridSpec{8.0, 65}.node(20, 30);
  CHECK_THROWS_AS(solve(VortexConfiguration({{node, 1}}), ConformalFactor::flat(), {8.0, 129}, s), ConfigError);
  CHECK_THROWS_AS(solve(VortexConfiguration({{{9.0, 0.0}, 1}}), ConformalFactor::flat(), {8.0, 129}, s), ConfigError);
}

TEST_CASE("symmetric configuration gives a symmetric solution") {
  const SolveReport r =
      solve(VortexConfiguration({{{0.0, 0.0}, 1}}), ConformalFactor::flat(), {8.0, 65}, quick(SolveMethod::newton));
  const ScalarGrid& u = r.field.u;
  const int m = u.size();
  double worst = 0.0;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      worst = std::max(worst, std::fabs(u(i, j) - u(j, i)));
      worst = std::max(worst, std::fabs(u(i, j) - u(m - 1 - i, j)));
    }
  CHECK(worst <= 1e-11);
}

TEST_CASE("translation equivariance in the interior") {
  // Shift by a whole number of cells: the solutions agree away from the boundary.
  const GridSpec spec{12.0, 193};
  const double shift = 8 * spec.spacing();
  const auto s = quick(SolveMethod::newton);
  const SolveReport a = solve(VortexConfiguration({{{0.03, 0.02}, 1}}), ConformalFactor::flat(), spec, s);
  const SolveReport b = solve(VortexConfiguration({{{0.03 + shift, 0.02}, 1}}), ConformalFactor::flat(), spec, s);
  double worst = 0.0;
  for (int j = 40; j < 150; ++j)
    for (int i = 40; i < 140; ++i) worst = std::max(worst, std::fabs(a.field.w(i, j) - b.field.w(i + 8, j)));
  CHECK(worst <= 1e-6);
}

TEST_CASE("results do not depend on the worker count") {
  const VortexConfiguration vc({{{0.7, 0.2}, 1}, {{-0.5, -0.9}, 1}});
  const int before = worker_count();
  set_worker_count(1);
  const SolveReport one = solve(vc, ConformalFactor::flat(), {6.0, 97}, quick(SolveMethod::both));
  set_worker_count(4);
  const SolveReport four = solve(vc, ConformalFactor::flat(), {6.0, 97}, quick(SolveMethod::both));
  set_worker_count(before);
  CHECK(sup_distance(one.field.u, four.field.u) == 0.0);
  CHECK(one.energy == four.energy);
  CHECK(one.observables.flux == four.observables.flux);
  CHECK(one.minimize->energy_history == four.minimize->energy_history);
}
