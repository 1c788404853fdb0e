#include "csvortex/vortex.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "csvortex/errors.hpp"

namespace csvortex {

VortexConfiguration::VortexConfiguration(std::vector<VortexSite> sites, double mu) : mu_(mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ConfigError("mu", "regulator must be a finite value > 0");
  for (std::size_t k = 0; k < sites.size(); ++k) {
    const auto& s = sites[k];
    const std::string path = "vortices[" + std::to_string(k) + "]";
    if (!std::isfinite(s.location.x) || !std::isfinite(s.location.y))
      throw ConfigError(path, "vortex coordinates must be finite");
    if (s.multiplicity < 1) throw ConfigError(path + ".n", "multiplicity must be >= 1");
    bool merged = false;
    for (auto& existing : sites_) {
      if (existing.location == s.location) {
        existing.multiplicity += s.multiplicity;
        merged = true;
        break;
      }
    }
    if (!merged) sites_.push_back(s);
    total_ += s.multiplicity;
  }
}

VortexConfiguration VortexConfiguration::translated(double dx, double dy) const {
  auto moved = sites_;
  for (auto& s : moved) s.location = {s.location.x + dx, s.location.y + dy};
  return VortexConfiguration(std::move(moved), mu_);
}

double eval_u0(const VortexConfiguration& vc, Point p) {
  double sum = 0.0;
  for (const auto& s : vc.sites()) {
    const double dx = p.x - s.location.x, dy = p.y - s.location.y;
    const double r2 = dx * dx + dy * dy;
    if (r2 == 0.0) return -std::numeric_limits<double>::infinity();
    sum -= s.multiplicity * std::log1p(vc.mu() / r2);
  }
  return sum;
}

double eval_h0(const VortexConfiguration& vc, Point p) {
  double sum = 0.0;
  for (const auto& s : vc.sites()) {
    const double dx = p.x - s.location.x, dy = p.y - s.location.y;
    const double d = vc.mu() + dx * dx + dy * dy;
    sum += s.multiplicity * vc.mu() / (d * d);
  }
  return 4.0 * sum;
}

double eval_B(const VortexConfiguration& vc, Point p) {
  double prod = 1.0;
  for (const auto& s : vc.sites()) {
    const double dx = p.x - s.location.x, dy = p.y - s.location.y;
    const double r2 = dx * dx + dy * dy;
    prod *= std::pow(r2 / (vc.mu() + r2), s.multiplicity);
  }
  return prod;
}

double eval_h(const VortexConfiguration& vc, const ConformalFactor& cf, Point p) {
  return eval_h0(vc, p) / cf.evaluate(p);
}

std::array<double, 2> eval_grad_u0(const VortexConfiguration& vc, Point p) {
  double gx = 0.0, gy = 0.0;
  for (const auto& s : vc.sites()) {
    const double dx = p.x - s.location.x, dy = p.y - s.location.y;
    const double r2 = dx * dx + dy * dy;
    const double f = 2.0 * s.multiplicity * vc.mu() / (r2 * (r2 + vc.mu()));
    gx += f * dx;
    gy += f * dy;
  }
  return {gx, gy};
}

std::array<double, 2> eval_grad_phase(const VortexConfiguration& vc, Point p) {
  double gx = 0.0, gy = 0.0;
  for (const auto& s : vc.sites()) {
    const double dx = p.x - s.location.x, dy = p.y - s.location.y;
    const double r2 = dx * dx + dy * dy;
    gx -= s.multiplicity * dy / r2;
    gy += s.multiplicity * dx / r2;
  }
  return {gx, gy};
}

double distance_to_nearest_vortex(const VortexConfiguration& vc, Point p) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& s : vc.sites()) d = std::min(d, std::hypot(p.x - s.location.x, p.y - s.location.y));
  return d;
}

double eval_phase(const VortexConfiguration& vc, Point p) {
  double theta = 0.0;
  for (const auto& s : vc.sites()) theta += s.multiplicity * std::atan2(p.y - s.location.y, p.x - s.location.x);
  return theta;
}

}  // namespace csvortex
