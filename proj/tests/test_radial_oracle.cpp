#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "csvortex/errors.hpp"
#include "csvortex/radial_oracle.hpp"
#include "csvortex/solver.hpp"

using namespace csvortex;

namespace {

const double pi = std::numbers::pi;

RadialProblem problem(int n, ConformalFactor cf = ConformalFactor::flat(), double mu = 1.0) {
  RadialProblem p;
  p.multiplicity = n;
  p.metric = std::move(cf);
  p.mu = mu;
  return p;
}

}  // namespace

TEST_CASE("profile matches an independent collocation solution") {
  // scipy solve_bvp on u'' + u'/r = Be^u(Be^u - 1) + h0, n = 1, μ = 1, w(40) = 0
  const RadialProfile prof = solve_radial(problem(1));
  CHECK(prof.w_at(0.5) == doctest::Approx(-3.641578247295551).epsilon(1e-9));
  CHECK(prof.w_at(1.0) == doctest::Approx(-2.261119781140218).epsilon(1e-9));
  CHECK(prof.w_at(2.0) == doctest::Approx(-0.9527751839298833).epsilon(1e-9));
  CHECK(prof.w_at(5.0) == doctest::Approx(-0.0451263573276912).epsilon(1e-8));
  CHECK(prof.w_at(10.0) == doctest::Approx(-0.00022183011898858906).epsilon(1e-7));
  CHECK(prof.u.front() == doctest::Approx(-2.254878989362203).epsilon(1e-9));
}

TEST_CASE("oracle flux and energy") {
  for (int n : {1, 2, 3})
    for (const auto& cf : {ConformalFactor::flat(), ConformalFactor::gaussian_bump(1.0, 2.0)}) {
      const RadialProfile prof = solve_radial(problem(n, cf));
      CHECK(radial_flux(prof) == doctest::Approx(2 * pi * n).epsilon(1e-3));
      CHECK(radial_energy(prof) == doctest::Approx(pi * n).epsilon(1e-3));
      CHECK(prof.refinement_change <= 1e-8);
    }
}

TEST_CASE("profile is negative and increasing") {
  const RadialProfile prof = solve_radial(problem(1));
  for (std::size_t i = 1; i < prof.r.size() - 1; ++i) {
    REQUIRE(prof.w[i] < 0.0);
    REQUIRE(prof.w[i + 1] > prof.w[i]);
  }
  CHECK(prof.w.back() == 0.0);
  CHECK(prof.bfield.front() == 0.0);
}

TEST_CASE("regulator independence") {
  const RadialProfile a = solve_radial(problem(1, ConformalFactor::flat(), 1.0));
  const RadialProfile b = solve_radial(problem(1, ConformalFactor::flat(), 9.0));
  double worst = 0.0;
  for (std::size_t i = 1; i < a.r.size(); ++i) worst = std::max(worst, std::fabs(a.w[i] - b.w[i]));
  CHECK(worst <= 1e-6);
}

TEST_CASE("decay slope tends to -sqrt(b at infinity)") {
  for (const auto& cf : {ConformalFactor::flat(), ConformalFactor::gaussian_bump(1.0, 2.0)}) {
    const RadialProfile prof = solve_radial(problem(1, cf));
    CHECK(radial_decay_slope(prof, 20.0, 35.0) == doctest::Approx(-1.0).epsilon(0.02));
  }
  const auto table = ConformalFactor::radial_table({0, 5, 10, 20, 40}, {2.0, 4.0, 4.0, 4.0, 4.0});
  const RadialProfile prof = solve_radial(problem(1, table));
  CHECK(radial_decay_slope(prof, 8.0, 14.0) == doctest::Approx(-2.0).epsilon(0.02));
}

TEST_CASE("validation") {
  RadialProblem p;
  p.multiplicity = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.metric = ConformalFactor::gaussian_bump(1.0, 2.0, {1.0, 0.0});
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.metric = ConformalFactor::radial_table({0, 10}, {1, 1});
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.nodes = 1001;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("comparison with the 2D solver and its guards") {
  SolveSettings s;
  s.method = SolveMethod::newton;
  s.continuation = {129, 257};
  const SolveReport r = solve(VortexConfiguration({{{0.0, 0.0}, 1}}), ConformalFactor::flat(), {16.0, 257}, s);
  const RadialProfile prof = solve_radial(problem(1));
  const OracleComparison c = compare_with_2d(prof, r.field);
  CHECK(c.sup_deviation <= 1e-2);
  CHECK(c.l2_deviation <= c.sup_deviation);
  CHECK(c.radius == 15.0);
  CHECK(c.samples > 1000);

  const SolveReport offset =
      solve(VortexConfiguration({{{1.7, -0.6}, 1}}), ConformalFactor::flat(), {16.0, 129}, SolveSettings{});
  CHECK_THROWS_AS(compare_with_2d(prof, offset.field), ConfigError);
  CHECK_THROWS_AS(compare_with_2d(solve_radial(problem(2)), r.field), ConfigError);
  CHECK_THROWS_AS(compare_with_2d(solve_radial(problem(1, ConformalFactor::gaussian_bump(1.0, 2.0))), r.field),
                  ConfigError);
}

TEST_CASE("profile csv") {
  RadialProblem p = problem(1);
  p.nodes = 64;
  const RadialProfile prof = solve_radial(p);
  std::ostringstream out;
  write_profile_csv(prof, out);
  const std::string text = out.str();
  CHECK(text.rfind("r,u,w,Bfield\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 66);
}
