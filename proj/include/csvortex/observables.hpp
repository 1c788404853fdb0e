#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "csvortex/grid.hpp"
#include "csvortex/metric.hpp"
#include "csvortex/vortex.hpp"

namespace csvortex {

/// A solved configuration: the regular part u on the grid and w = u0 + u.
/// All observables are in rescaled units e = v = κ = 1, upper-sign
/// (positive flux) branch, |φ|² = e^w.
struct VortexField {
  VortexConfiguration vortices;
  ConformalFactor metric;
  GridSpec grid;
  ScalarGrid u;
  ScalarGrid w;
  /// Ghost values of u (= -u0, so that w vanishes on the ring).
  BoundaryRing u_ring;

  static VortexField from_regular_part(VortexConfiguration vc, ConformalFactor cf, ScalarGrid u);

  /// u and w at an arbitrary point, via cubic interpolation of u.
  double u_at(Point p) const { return sample_cubic(u, u_ring, p); }
  double w_at(Point p) const { return eval_u0(vortices, p) + u_at(p); }
};

struct DecayWindow {
  double r_min = 0.0;
  double r_max = 0.0;
  bool operator==(const DecayWindow&) const = default;
};

/// Fit of the angular-averaged profile to -a e^{-b r}. `b_fit` is the
/// least-squares slope of ln(-w̄); `a_fit` is the smallest a making
/// -a e^{-b_fit r} <= w̄(r) on every sampled radius.
struct DecayFit {
  double a_fit = 0.0;
  double b_fit = 0.0;
  double a_least_squares = 0.0;
  DecayWindow window;
  std::vector<double> radii;
  std::vector<double> profile;
  /// -a e^{-b r} <= w̄(r) < 0 across the window.
  bool sign_bound_holds = false;
};

struct ObservableOptions {
  /// Defaults to [L/2, L - 2].
  std::optional<DecayWindow> decay_window;
  int rays = 64;
};

struct GaugePotential {
  ScalarGrid ax;
  ScalarGrid ay;
  /// 1 where the node is within 2Δ of a vortex; components are zeroed there.
  std::vector<std::uint8_t> masked;
};

struct SpinPair {
  double direct = 0.0;
  double by_parts = 0.0;
};

struct CurlCheck {
  /// max |curl - b·B̃| / max |b·B̃| over unmasked nodes.
  double max_relative_deviation = 0.0;
  int compared_nodes = 0;
};

struct ObservableSet {
  double flux = 0.0;
  double energy = 0.0;
  SpinPair spin;
  std::optional<DecayFit> decay;
  std::string decay_error;
  double w_max = 0.0;
  std::vector<double> a0_core_values;
  double a0_min = 0.0;
  double a0_max = 0.0;
  double bfield_max = 0.0;
  double curl_deviation = 0.0;
  double circulation = 0.0;
  int lattice_winding = 0;
  double self_duality_residual = 0.0;
};

/// B̃ = ½ e^w (1 - e^w).
ScalarGrid magnetic_field(const ScalarGrid& w);
/// ∫ B̃ dV_γ; equals 2πn for a converged solution.
double total_flux(const ScalarGrid& w, const ConformalFactor& cf);
/// ∫ (b/4) e^w (1 - e^w)² + (1/4) e^w |∇0 w|² dz with ∇0 w = ∇u0 (analytic) + ∇u (discrete).
double total_energy(const VortexField& field);
SpinPair spin(const VortexField& field);
/// A0 = ½ (1 - e^w), from the Gauss law with the first Bogomolnyi equation.
ScalarGrid temporal_potential(const ScalarGrid& w);
/// eA_i = ∂_iΘ - ε_ij ∂_j(w/2) at nodes.
GaugePotential gauge_potential(const VortexField& field);
/// Compares the magnetic curl -(∂1 A2 - ∂2 A1) of the reconstructed gauge
/// field with b·B̃ at every unmasked node. Singular parts (phase, u0) are
/// differentiated analytically; the u part uses the five-point stencil,
/// i.e. the dual-lattice curl of ½∇u.
CurlCheck curl_check(const VortexField& field);
/// Counterclockwise ∮ eA·dl around the square of lattice nodes at the given
/// half side; tends to 2πn for large loops.
double loop_circulation(const VortexField& field, double half_side);
/// Σ over lattice plaquettes of the phase winding; equals n unless a vortex lies on a lattice link.
int lattice_winding(const VortexField& field);
/// max |b·B̃ + ½ Δ0 w| over nodes at distance >= max(1, 3Δ) from every vortex,
/// with Δ0 the five-point stencil applied to sampled w.
double self_duality_residual(const VortexField& field);

DecayFit fit_decay(const ScalarGrid& w, DecayWindow window, int rays = 64);
DecayWindow default_decay_window(const GridSpec& grid);

ObservableSet compute_observables(const VortexField& field, const ObservableOptions& options = {});

}  // namespace csvortex
