#include <doctest.h>

#include <cmath>
#include <numbers>

#include "csvortex/errors.hpp"
#include "csvortex/observables.hpp"
#include "csvortex/solver.hpp"

using namespace csvortex;

namespace {

const double pi = std::numbers::pi;

SolveReport solved(int n, const ConformalFactor& cf, GridSpec grid = {16.0, 257}) {
  SolveSettings s;
  s.method = SolveMethod::newton;
  s.continuation = {129, 257};
  if (grid.nodes != 257) s.continuation = {};
  return solve(VortexConfiguration({{{0.0, 0.0}, n}}), cf, grid, s);
}

}  // namespace

TEST_CASE("magnetic field and temporal potential pointwise") {
  const GridSpec spec{1.0, 33};
  ScalarGrid w(spec, 0.0);
  w(0, 0) = std::log(0.5);
  w(1, 0) = -40.0;
  const ScalarGrid b = magnetic_field(w);
  const ScalarGrid a0 = temporal_potential(w);
  CHECK(b(2, 2) == 0.0);
  CHECK(b(0, 0) == doctest::Approx(0.125));
  CHECK(b(1, 0) == doctest::Approx(0.5 * std::exp(-40.0)));
  CHECK(a0(2, 2) == 0.0);
  CHECK(a0(0, 0) == doctest::Approx(0.25));
  CHECK(a0(1, 0) == doctest::Approx(0.5));
}

TEST_CASE("decay fit of exact exponentials") {
  const GridSpec spec{16.0, 257};
  const ScalarGrid w = ScalarGrid::sample(spec, [](Point p) { return -std::exp(-2.0 * std::hypot(p.x, p.y)); });
  const DecayFit fit = fit_decay(w, default_decay_window(spec));
  CHECK(fit.b_fit == doctest::Approx(2.0).epsilon(0.005));
  CHECK(fit.sign_bound_holds);
  const ScalarGrid w3 = ScalarGrid::sample(spec, [](Point p) { return -3.0 * std::exp(-std::hypot(p.x, p.y)); });
  const DecayFit f3 = fit_decay(w3, {4.0, 12.0});
  CHECK(f3.b_fit == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(f3.a_least_squares == doctest::Approx(3.0).epsilon(1e-2));
  for (std::size_t k = 0; k < f3.radii.size(); ++k)
    CHECK(-f3.a_fit * std::exp(-f3.b_fit * f3.radii[k]) <= f3.profile[k] * (1 - 1e-12));
}

TEST_CASE("decay fit errors") {
  const GridSpec spec{16.0, 129};
  const ScalarGrid w = ScalarGrid::sample(spec, [](Point p) { return -std::exp(-std::hypot(p.x, p.y)); });
  CHECK_THROWS_AS(fit_decay(w, {5.0, 5.0}), NumericalError);
  CHECK_THROWS_AS(fit_decay(w, {5.0, 15.0}), NumericalError);
  CHECK_THROWS_AS(fit_decay(ScalarGrid(spec, 0.0), {8.0, 14.0}), NumericalError);
  const GridSpec small{4.0, 129};
  CHECK_THROWS_AS(fit_decay(ScalarGrid(small, -1.0), default_decay_window(small)), NumericalError);
}

TEST_CASE("trivial field has zero observables") {
  const VortexField f =
      VortexField::from_regular_part(VortexConfiguration(), ConformalFactor::flat(), ScalarGrid({8.0, 65}));
  const ObservableSet o = compute_observables(f);
  CHECK(o.flux == 0.0);
  CHECK(o.energy == 0.0);
  CHECK(o.spin.direct == 0.0);
  CHECK(o.spin.by_parts == 0.0);
  CHECK(o.bfield_max == 0.0);
  CHECK(o.lattice_winding == 0);
  CHECK(o.circulation == 0.0);
  CHECK_FALSE(o.decay);
  const GaugePotential a = gauge_potential(f);
  CHECK(a.ax.max_abs() == 0.0);
  CHECK(a.ay.max_abs() == 0.0);
}

TEST_CASE("single vortex observables") {
  const SolveReport r = solved(1, ConformalFactor::flat());
  REQUIRE(r.converged);
  const ObservableSet& o = r.observables;
  CHECK(o.flux == doctest::Approx(2 * pi).epsilon(1e-3));
  CHECK(o.energy == doctest::Approx(pi).epsilon(5e-3));
  CHECK(std::fabs(o.spin.direct - o.spin.by_parts) <= 1e-3 * std::fabs(o.spin.by_parts));
  // Flat metric: by_parts = -(1/4)∫(e^w - 1)².
  double direct = 0.0;
  for (double w : r.field.w.values()) direct += std::expm1(w) * std::expm1(w);
  direct *= -0.25 * r.field.grid.spacing() * r.field.grid.spacing();
  CHECK(o.spin.by_parts == doctest::Approx(direct).epsilon(1e-12));
  CHECK(o.w_max <= 1e-8);
  REQUIRE(o.a0_core_values.size() == 1);
  CHECK(o.a0_core_values[0] == 0.5);
  CHECK(o.a0_min >= 0.0);
  CHECK(o.a0_max <= 0.5);
  CHECK(o.bfield_max <= 0.125);
  CHECK(o.bfield_max == doctest::Approx(0.125).epsilon(1e-2));
  CHECK(o.lattice_winding == 1);
  CHECK(o.circulation == doctest::Approx(2 * pi).epsilon(1e-2));
  CHECK(o.curl_deviation <= 1e-2);
  REQUIRE(o.decay);
  CHECK(o.decay->b_fit == doctest::Approx(1.0).epsilon(0.05));
  CHECK(o.decay->sign_bound_holds);
}

TEST_CASE("flux is independent of the metric") {
  const SolveReport r = solved(2, ConformalFactor::gaussian_bump(1.0, 2.0));
  REQUIRE(r.converged);
  CHECK(r.observables.flux == doctest::Approx(4 * pi).epsilon(1e-3));
  CHECK(r.observables.energy == doctest::Approx(2 * pi).epsilon(5e-3));
  CHECK(r.observables.lattice_winding == 2);
}

TEST_CASE("self-duality residual is second order") {
  const double coarse = solved(1, ConformalFactor::flat(), {16.0, 129}).observables.self_duality_residual;
  const double fine = solved(1, ConformalFactor::flat(), {16.0, 257}).observables.self_duality_residual;
  CHECK(coarse / fine >= 2.5);
  CHECK(coarse / fine <= 5.0);
}

TEST_CASE("gauge potential masks cores and its curl matches b B") {
  const SolveReport r = solved(1, ConformalFactor::gaussian_bump(1.0, 2.0));
  const GaugePotential a = gauge_potential(r.field);
  int masked = 0;
  for (auto flag : a.masked) masked += flag;
  CHECK(masked >= 4);
  CHECK(masked <= 16);
  const CurlCheck c = curl_check(r.field);
  CHECK(c.compared_nodes == r.field.grid.cells() * r.field.grid.cells() - masked);
  CHECK(c.max_relative_deviation <= 1e-2);
  // Far from the core eA is the pure phase gradient plus a small correction.
  const int m = r.field.grid.cells();
  const Point q = r.field.grid.node(m - 3, m / 2);
  const double r2 = q.x * q.x + q.y * q.y;
  CHECK(a.ax(m - 3, m / 2) == doctest::Approx(-q.y / r2).epsilon(1e-3));
  CHECK(a.ay(m - 3, m / 2) == doctest::Approx(q.x / r2).epsilon(1e-3));
}
