#pragma once

#include <array>
#include <vector>

#include "csvortex/metric.hpp"

namespace csvortex {

struct VortexSite {
  Point location{};
  int multiplicity = 1;
  bool operator==(const VortexSite&) const = default;
};

/// Vortex locations with integer multiplicities and the regulator μ of the
/// background split w = u0 + u. Coincident sites are merged into one site
/// carrying the summed multiplicity.
class VortexConfiguration {
 public:
  VortexConfiguration() = default;
  VortexConfiguration(std::vector<VortexSite> sites, double mu = 1.0);

  const std::vector<VortexSite>& sites() const { return sites_; }
  int total_vorticity() const { return total_; }
  double mu() const { return mu_; }
  bool empty() const { return sites_.empty(); }

  VortexConfiguration with_mu(double mu) const { return VortexConfiguration(sites_, mu); }
  VortexConfiguration translated(double dx, double dy) const;

  bool operator==(const VortexConfiguration&) const = default;

 private:
  std::vector<VortexSite> sites_;
  double mu_ = 1.0;
  int total_ = 0;
};

/// u0(z) = -Σ n_k ln(1 + μ/|z - z_k|²). Returns -∞ exactly at a vortex site.
double eval_u0(const VortexConfiguration& vc, Point p);
/// h0(z) = 4 Σ n_k μ / (μ + |z - z_k|²)².
double eval_h0(const VortexConfiguration& vc, Point p);
/// B(z) = Π (|z - z_k|² / (μ + |z - z_k|²))^{n_k} = e^{u0}.
double eval_B(const VortexConfiguration& vc, Point p);
/// h = h0 / b.
double eval_h(const VortexConfiguration& vc, const ConformalFactor& cf, Point p);
/// Analytic ∇u0; undefined (non-finite) at a vortex site.
std::array<double, 2> eval_grad_u0(const VortexConfiguration& vc, Point p);
/// Gradient of the multivalued phase Θ = Σ n_k arg(z - z_k).
std::array<double, 2> eval_grad_phase(const VortexConfiguration& vc, Point p);
/// Σ n_k arg(z - z_k), each term in (-π, π].
double eval_phase(const VortexConfiguration& vc, Point p);

/// Euclidean distance to the closest site; +∞ without vortices.
double distance_to_nearest_vortex(const VortexConfiguration& vc, Point p);

/// Closed-form background fields bound to one configuration and metric.
class BackgroundFields {
 public:
  BackgroundFields(VortexConfiguration vc, ConformalFactor cf) : vc_(std::move(vc)), cf_(std::move(cf)) {}

  const VortexConfiguration& vortices() const { return vc_; }
  const ConformalFactor& metric() const { return cf_; }

  double u0(Point p) const { return eval_u0(vc_, p); }
  double h0(Point p) const { return eval_h0(vc_, p); }
  double weight(Point p) const { return eval_B(vc_, p); }
  double h(Point p) const { return eval_h(vc_, cf_, p); }
  std::array<double, 2> grad_u0(Point p) const { return eval_grad_u0(vc_, p); }

 private:
  VortexConfiguration vc_;
  ConformalFactor cf_;
};

}  // namespace csvortex
