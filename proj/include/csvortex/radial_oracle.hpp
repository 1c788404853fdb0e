#pragma once

#include <iosfwd>
#include <vector>

#include "csvortex/metric.hpp"
#include "csvortex/observables.hpp"

namespace csvortex {

/// One vortex of multiplicity n at the origin on a radial metric, reduced
/// to u'' + u'/r = b Be^u(Be^u - 1) + h0 on [0, r_max].
struct RadialProblem {
  int multiplicity = 1;
  double mu = 1.0;
  ConformalFactor metric = ConformalFactor::flat();
  double r_max = 40.0;
  /// Mesh intervals; the mesh is r = r_max sinh(κ ξ)/sinh κ, ξ uniform in [0, 1].
  int nodes = 8192;
  double clustering = 4.0;
  /// Newton stops once max |δu| stays below this for two consecutive steps.
  double tolerance = 1e-13;
  int max_iterations = 100;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct RadialProfile {
  RadialProblem problem;
  std::vector<double> r;
  std::vector<double> u;
  std::vector<double> w;
  std::vector<double> bfield;
  /// Newton iterations on the finest mesh.
  int iterations = 0;
  /// sup |w| change of the extrapolated profile when the mesh is halved.
  double refinement_change = 0.0;

  /// Cubic interpolation of u; w adds the analytic u0.
  double u_at(double radius) const;
  double w_at(double radius) const;
};

/// Damped Newton on a finite-volume three-point scheme, solved in long double on
/// meshes of `nodes` and 2·`nodes` intervals and Richardson-extrapolated.
/// w vanishes at r_max. Throws NumericalError if Newton stalls.
RadialProfile solve_radial(const RadialProblem& problem);

/// 2π ∫ B̃ b r dr.
double radial_flux(const RadialProfile& profile);
/// 2π ∫ [(b/4) e^w(1 - e^w)² + (1/4) e^w w'²] r dr.
double radial_energy(const RadialProfile& profile);
/// Least-squares slope of ln(-w) over mesh radii in [r_min, r_max].
double radial_decay_slope(const RadialProfile& profile, double r_min, double r_max);

struct OracleComparison {
  double sup_deviation = 0.0;
  /// Area-weighted root mean square over the sampled disk.
  double l2_deviation = 0.0;
  double radius = 0.0;
  int samples = 0;
};

/// Samples the 2D w on 64 rays at every oracle radius up to L - 1 and compares
/// with the profile. Throws ConfigError unless the field has a single vortex
/// at the origin with the same multiplicity and the same metric.
OracleComparison compare_with_2d(const RadialProfile& profile, const VortexField& field, int rays = 64);

/// "r,u,w,Bfield" with 17 significant digits.
void write_profile_csv(const RadialProfile& profile, std::ostream& out);

}  // namespace csvortex
