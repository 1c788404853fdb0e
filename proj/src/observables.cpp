#include "csvortex/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "csvortex/errors.hpp"
#include "csvortex/parallel.hpp"

namespace csvortex {
namespace {

ScalarGrid sample_metric(const GridSpec& grid, const ConformalFactor& cf) {
  return ScalarGrid::sample(grid, [&](Point p) { return cf.evaluate(p); });
}

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::remainder(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  return a;
}

/// Phase increment along a short segment a → b, Σ n_k wrap(Δ arg(z - z_k)).
double phase_increment(const VortexConfiguration& vc, Point a, Point b) {
  double inc = 0.0;
  for (const auto& s : vc.sites()) {
    const double ta = std::atan2(a.y - s.location.y, a.x - s.location.x);
    const double tb = std::atan2(b.y - s.location.y, b.x - s.location.x);
    inc += s.multiplicity * wrap_angle(tb - ta);
  }
  return inc;
}

}  // namespace

VortexField VortexField::from_regular_part(VortexConfiguration vc, ConformalFactor cf, ScalarGrid u) {
  VortexField f;
  f.grid = u.spec();
  f.vortices = std::move(vc);
  f.metric = std::move(cf);
  f.w = ScalarGrid(f.grid);
  const int m = u.size();
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) f.w(i, j) = eval_u0(f.vortices, f.grid.node(i, j)) + u(i, j);
  const VortexConfiguration& vref = f.vortices;
  f.u_ring = BoundaryRing::sample(f.grid, [&](Point p) { return -eval_u0(vref, p); });
  f.u = std::move(u);
  return f;
}

ScalarGrid magnetic_field(const ScalarGrid& w) {
  ScalarGrid out(w.spec());
  auto in = w.values();
  auto o = out.values();
  for (std::size_t k = 0; k < in.size(); ++k) o[k] = -0.5 * std::exp(in[k]) * std::expm1(in[k]);
  return out;
}

double total_flux(const ScalarGrid& w, const ConformalFactor& cf) {
  return integrate_metric(magnetic_field(w), cf);
}

ScalarGrid temporal_potential(const ScalarGrid& w) {
  ScalarGrid out(w.spec());
  auto in = w.values();
  auto o = out.values();
  for (std::size_t k = 0; k < in.size(); ++k) o[k] = -0.5 * std::expm1(in[k]);
  return out;
}

double total_energy(const VortexField& field) {
  const auto [ux, uy] = gradient0(field.u);
  const ScalarGrid b = sample_metric(field.grid, field.metric);
  const int m = field.u.size();
  const double area = field.grid.spacing() * field.grid.spacing();
  return area * reduce_rows(m, [&](int j) {
           CompensatedSum s;
           for (int i = 0; i < m; ++i) {
             const Point p = field.grid.node(i, j);
             const auto g0 = eval_grad_u0(field.vortices, p);
             const double wx = g0[0] + ux(i, j), wy = g0[1] + uy(i, j);
             const double t = std::exp(field.w(i, j));
             const double one_minus_t = -std::expm1(field.w(i, j));
             s.add(0.25 * b(i, j) * t * one_minus_t * one_minus_t + 0.25 * t * (wx * wx + wy * wy));
           }
           return s.value();
         });
}

SpinPair spin(const VortexField& field) {
  const auto [ux, uy] = gradient0(field.u);
  const int m = field.u.size();
  const double area = field.grid.spacing() * field.grid.spacing();
  SpinPair out;
  out.direct = area / 8.0 * reduce_rows(m, [&](int j) {
                 CompensatedSum s;
                 for (int i = 0; i < m; ++i) {
                   const Point p = field.grid.node(i, j);
                   const auto g0 = eval_grad_u0(field.vortices, p);
                   const double wx = g0[0] + ux(i, j), wy = g0[1] + uy(i, j);
                   const double w = field.w(i, j);
                   const double em1 = std::expm1(w);
                   // x^i ∂_i (e^w - 1)² = 2 (e^w - 1) e^w (x wx + y wy)
                   s.add(field.metric.evaluate(p) * 2.0 * em1 * std::exp(w) * (p.x * wx + p.y * wy));
                 }
                 return s.value();
               });
  out.by_parts = -area / 8.0 * reduce_rows(m, [&](int j) {
                   CompensatedSum s;
                   for (int i = 0; i < m; ++i) {
                     const Point p = field.grid.node(i, j);
                     const double em1 = std::expm1(field.w(i, j));
                     const auto gb = field.metric.gradient(p.x, p.y);
                     s.add(em1 * em1 * (2.0 * field.metric.evaluate(p) + p.x * gb[0] + p.y * gb[1]));
                   }
                   return s.value();
                 });
  return out;
}

GaugePotential gauge_potential(const VortexField& field) {
  const auto [ux, uy] = gradient0(field.u);
  const int m = field.u.size();
  const double mask_radius = 2.0 * field.grid.spacing();
  GaugePotential a{ScalarGrid(field.grid), ScalarGrid(field.grid),
                   std::vector<std::uint8_t>(static_cast<std::size_t>(m) * m, 0)};
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      const Point p = field.grid.node(i, j);
      if (distance_to_nearest_vortex(field.vortices, p) <= mask_radius) {
        a.masked[static_cast<std::size_t>(j) * m + i] = 1;
        continue;
      }
      const auto gt = eval_grad_phase(field.vortices, p);
      const auto g0 = eval_grad_u0(field.vortices, p);
      const double wx = g0[0] + ux(i, j), wy = g0[1] + uy(i, j);
      // ε_12 = 1: A1 = ∂1Θ - ½∂2 w, A2 = ∂2Θ + ½∂1 w.
      a.ax(i, j) = gt[0] - 0.5 * wy;
      a.ay(i, j) = gt[1] + 0.5 * wx;
    }
  return a;
}

CurlCheck curl_check(const VortexField& field) {
  const ScalarGrid lap = laplacian0(field.u, field.u_ring);
  const ScalarGrid bt = magnetic_field(field.w);
  const int m = field.u.size();
  const double mask_radius = 2.0 * field.grid.spacing();
  double max_dev = 0.0, max_ref = 0.0;
  int count = 0;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      const Point p = field.grid.node(i, j);
      if (distance_to_nearest_vortex(field.vortices, p) <= mask_radius) continue;
      // curl ∇Θ = 0 away from the cores; Δ0 u0 = -h0 there.
      const double curl = 0.5 * (lap(i, j) - eval_h0(field.vortices, p));
      const double ref = field.metric.evaluate(p) * bt(i, j);
      max_dev = std::max(max_dev, std::fabs(-curl - ref));
      max_ref = std::max(max_ref, std::fabs(ref));
      ++count;
    }
  CurlCheck c;
  c.compared_nodes = count;
  c.max_relative_deviation = max_ref > 0.0 ? max_dev / max_ref : max_dev;
  return c;
}

double loop_circulation(const VortexField& field, double half_side) {
  const GridSpec& g = field.grid;
  const int m = g.cells();
  const double h = g.spacing();
  const int lo = std::clamp(static_cast<int>(std::lround((g.half_width - half_side) / h - 0.5)), 1, m / 2 - 1);
  const int hi = m - 1 - lo;
  const auto [ux, uy] = gradient0(field.u);
  // Path through nodes (lo,lo) → (hi,lo) → (hi,hi) → (lo,hi) → (lo,lo).
  std::vector<std::array<int, 2>> path;
  for (int i = lo; i < hi; ++i) path.push_back({i, lo});
  for (int j = lo; j < hi; ++j) path.push_back({hi, j});
  for (int i = hi; i > lo; --i) path.push_back({i, hi});
  for (int j = hi; j > lo; --j) path.push_back({lo, j});
  path.push_back({lo, lo});

  auto w_gradient = [&](int i, int j) {
    const auto g0 = eval_grad_u0(field.vortices, g.node(i, j));
    return std::array<double, 2>{g0[0] + ux(i, j), g0[1] + uy(i, j)};
  };
  CompensatedSum total;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const auto [i0, j0] = path[k];
    const auto [i1, j1] = path[k + 1];
    const Point a = g.node(i0, j0), b = g.node(i1, j1);
    total.add(phase_increment(field.vortices, a, b));
    const auto ga = w_gradient(i0, j0), gb = w_gradient(i1, j1);
    const double dx = b.x - a.x, dy = b.y - a.y;
    // w part of eA: (-½∂2 w, ½∂1 w), trapezoid along the link.
    const double ax = -0.25 * (ga[1] + gb[1]), ay = 0.25 * (ga[0] + gb[0]);
    total.add(ax * dx + ay * dy);
  }
  return total.value();
}

int lattice_winding(const VortexField& field) {
  const GridSpec& g = field.grid;
  const int m = g.cells();
  double sum = 0.0;
  for (int j = 0; j + 1 < m; ++j)
    for (int i = 0; i + 1 < m; ++i) {
      const Point p00 = g.node(i, j), p10 = g.node(i + 1, j), p11 = g.node(i + 1, j + 1), p01 = g.node(i, j + 1);
      const double c = phase_increment(field.vortices, p00, p10) + phase_increment(field.vortices, p10, p11) +
                       phase_increment(field.vortices, p11, p01) + phase_increment(field.vortices, p01, p00);
      sum += std::round(c / (2.0 * std::numbers::pi));
    }
  return static_cast<int>(std::lround(sum));
}

double self_duality_residual(const VortexField& field) {
  const ScalarGrid lap = laplacian0(field.w, BoundaryRing::zero(field.grid));
  const ScalarGrid bt = magnetic_field(field.w);
  const int m = field.w.size();
  const double keep_out = std::max(1.0, 3.0 * field.grid.spacing());
  double worst = 0.0;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      const Point p = field.grid.node(i, j);
      if (distance_to_nearest_vortex(field.vortices, p) < keep_out) continue;
      worst = std::max(worst, std::fabs(field.metric.evaluate(p) * bt(i, j) + 0.5 * lap(i, j)));
    }
  return worst;
}

DecayWindow default_decay_window(const GridSpec& grid) {
  return {grid.half_width / 2.0, grid.half_width - 2.0};
}

DecayFit fit_decay(const ScalarGrid& w, DecayWindow window, int rays) {
  const GridSpec& g = w.spec();
  if (!(window.r_min >= 0.0) || !(window.r_max > window.r_min))
    throw NumericalError("decay window [" + std::to_string(window.r_min) + ", " + std::to_string(window.r_max) +
                         "] is empty");
  if (window.r_max > g.half_width - 2.0 + 1e-12)
    throw NumericalError("decay window must end at least 2 length units inside the boundary");
  if (rays < 1) throw NumericalError("need at least one ray");
  const BoundaryRing zero = BoundaryRing::zero(g);
  const double step = g.spacing();
  const int samples = std::max(2, static_cast<int>(std::floor((window.r_max - window.r_min) / step)) + 1);
  DecayFit fit;
  fit.window = window;
  for (int k = 0; k < samples; ++k) {
    const double r = window.r_min + (window.r_max - window.r_min) * k / (samples - 1);
    double avg = 0.0;
    for (int q = 0; q < rays; ++q) {
      const double theta = 2.0 * std::numbers::pi * q / rays;
      avg += sample_bilinear(w, zero, {r * std::cos(theta), r * std::sin(theta)});
    }
    avg /= rays;
    if (!(avg < 0.0))
      throw NumericalError("angular-averaged w is not negative at r = " + std::to_string(r) +
                           "; the domain is too small for a decay fit");
    fit.radii.push_back(r);
    fit.profile.push_back(avg);
  }
  // Least squares ln(-w̄) = ln a - b r.
  const int n = samples;
  double sr = 0, sy = 0;
  for (int k = 0; k < n; ++k) {
    sr += fit.radii[k];
    sy += std::log(-fit.profile[k]);
  }
  const double rbar = sr / n, ybar = sy / n;
  double sxx = 0, sxy = 0;
  for (int k = 0; k < n; ++k) {
    const double dr = fit.radii[k] - rbar;
    sxx += dr * dr;
    sxy += dr * (std::log(-fit.profile[k]) - ybar);
  }
  const double slope = sxy / sxx;
  fit.b_fit = -slope;
  fit.a_least_squares = std::exp(ybar - slope * rbar);
  double a = 0.0;
  for (int k = 0; k < n; ++k) a = std::max(a, -fit.profile[k] * std::exp(fit.b_fit * fit.radii[k]));
  fit.a_fit = a;
  fit.sign_bound_holds = fit.a_fit > 0.0 && fit.b_fit > 0.0;
  for (int k = 0; k < n; ++k) {
    const double lower = -fit.a_fit * std::exp(-fit.b_fit * fit.radii[k]);
    if (!(fit.profile[k] < 0.0) || lower > fit.profile[k] * (1.0 - 1e-12)) fit.sign_bound_holds = false;
  }
  return fit;
}

ObservableSet compute_observables(const VortexField& field, const ObservableOptions& options) {
  ObservableSet obs;
  const ScalarGrid b = sample_metric(field.grid, field.metric);
  const ScalarGrid bt = magnetic_field(field.w);
  obs.flux = integrate_metric(bt, b);
  obs.energy = total_energy(field);
  obs.spin = spin(field);
  obs.w_max = field.w.max();
  obs.bfield_max = bt.max();
  const ScalarGrid a0 = temporal_potential(field.w);
  obs.a0_min = a0.min();
  obs.a0_max = a0.max();
  for (const auto& s : field.vortices.sites())
    obs.a0_core_values.push_back(-0.5 * std::expm1(field.w_at(s.location)));
  obs.curl_deviation = curl_check(field).max_relative_deviation;
  obs.circulation = loop_circulation(field, field.grid.half_width - 1.0);
  obs.lattice_winding = lattice_winding(field);
  obs.self_duality_residual = self_duality_residual(field);
  if (!field.vortices.empty()) {
    try {
      obs.decay = fit_decay(field.w, options.decay_window.value_or(default_decay_window(field.grid)), options.rays);
    } catch (const NumericalError& e) {
      obs.decay_error = e.what();
    }
  }
  return obs;
}

}  // namespace csvortex
