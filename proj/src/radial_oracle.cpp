#include "csvortex/radial_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "csvortex/errors.hpp"

namespace csvortex {

namespace {

using real = long double;

/// Radius beyond which the source is taken as -L_h[u0], i.e. the scheme acts on w directly.
constexpr real kFarField = 1.0L;

struct Mesh {
  std::vector<real> r, b, u0, h0;
  std::vector<real> conductance;  // r_{i+1/2} / (r_{i+1} - r_i), i = 0..M-1
  std::vector<real> volume;       // control volume / (2π)
};

real u0_of(int n, real mu, real r) { return -n * std::log1p(mu / (r * r)); }

Mesh build_mesh(const RadialProblem& p, int intervals) {
  Mesh m;
  const int M = intervals;
  const real kappa = p.clustering, R = p.r_max;
  m.r.resize(M + 1);
  for (int i = 0; i <= M; ++i) m.r[i] = R * std::sinh(kappa * i / M) / std::sinh(kappa);
  m.r[M] = R;
  m.b.resize(M + 1);
  m.u0.resize(M + 1);
  m.h0.resize(M + 1);
  const real mu = p.mu;
  for (int i = 0; i <= M; ++i) {
    const real r = m.r[i];
    m.b[i] = p.metric.radial_value(static_cast<double>(r));
    m.u0[i] = i == 0 ? -INFINITY : u0_of(p.multiplicity, mu, r);
    const real s = mu + r * r;
    m.h0[i] = 4.0L * p.multiplicity * mu / (s * s);
  }
  m.conductance.resize(M);
  for (int i = 0; i < M; ++i) m.conductance[i] = 0.5L * (m.r[i] + m.r[i + 1]) / (m.r[i + 1] - m.r[i]);
  m.volume.resize(M + 1);
  for (int i = 0; i <= M; ++i) {
    const real lo = i == 0 ? 0.0L : 0.5L * (m.r[i - 1] + m.r[i]);
    const real hi = i == M ? m.r[M] : 0.5L * (m.r[i] + m.r[i + 1]);
    m.volume[i] = 0.5L * (hi * hi - lo * lo);
  }
  return m;
}

/// vol_i · (L_h u - b e^w expm1(w) - S)_i for i < M.
void residual(const Mesh& m, const std::vector<real>& u, std::vector<real>& g) {
  const int M = static_cast<int>(m.r.size()) - 1;
  for (int i = 0; i < M; ++i) {
    const real right = m.conductance[i] * (u[i + 1] - u[i]);
    const real left = i == 0 ? 0.0L : m.conductance[i - 1] * (u[i] - u[i - 1]);
    real value;
    if (m.r[i] >= kFarField) {
      const real wr = m.u0[i + 1] + u[i + 1], wc = m.u0[i] + u[i], wl = m.u0[i - 1] + u[i - 1];
      const real flux = m.conductance[i] * (wr - wc) - m.conductance[i - 1] * (wc - wl);
      const real e = std::expm1(wc);
      value = flux - m.volume[i] * m.b[i] * (1.0L + e) * e;
    } else {
      const real e = i == 0 ? -1.0L : std::expm1(m.u0[i] + u[i]);
      value = right - left - m.volume[i] * (m.b[i] * (1.0L + e) * e + m.h0[i]);
    }
    g[i] = value;
  }
}

real sum_squares(const std::vector<real>& g) {
  real s = 0.0L;
  for (real v : g) s += v * v;
  return s;
}

std::vector<real> newton(const Mesh& m, const RadialProblem& p, int& iterations) {
  const int M = static_cast<int>(m.r.size()) - 1;
  std::vector<real> u(M + 1, 0.0L), g(M), trial(M + 1), g_trial(M);
  u[M] = -m.u0[M];
  std::vector<real> lower(M), diag(M), upper(M), delta(M);
  residual(m, u, g);
  real merit = sum_squares(g);
  int quiet = 0;
  for (iterations = 0; iterations < p.max_iterations; ++iterations) {
    for (int i = 0; i < M; ++i) {
      const real t = i == 0 ? 0.0L : std::exp(m.u0[i] + u[i]);
      const real cl = i == 0 ? 0.0L : m.conductance[i - 1];
      const real cr = m.conductance[i];
      lower[i] = cl;
      upper[i] = i + 1 < M ? cr : 0.0L;
      diag[i] = -(cl + cr) - m.volume[i] * m.b[i] * t * (2.0L * t - 1.0L);
    }
    // Thomas solve of J δ = -g.
    std::vector<real> c(M), d(M);
    c[0] = upper[0] / diag[0];
    d[0] = -g[0] / diag[0];
    for (int i = 1; i < M; ++i) {
      const real den = diag[i] - lower[i] * c[i - 1];
      c[i] = upper[i] / den;
      d[i] = (-g[i] - lower[i] * d[i - 1]) / den;
    }
    delta[M - 1] = d[M - 1];
    for (int i = M - 2; i >= 0; --i) delta[i] = d[i] - c[i] * delta[i + 1];

    real lambda = 1.0L;
    while (true) {
      for (int i = 0; i < M; ++i) trial[i] = u[i] + lambda * delta[i];
      trial[M] = u[M];
      residual(m, trial, g_trial);
      const real trial_merit = sum_squares(g_trial);
      if (std::isfinite(trial_merit) && (trial_merit <= (1.0L - 1e-4L * lambda) * merit || merit == 0.0L)) {
        merit = trial_merit;
        break;
      }
      lambda *= 0.5L;
      if (lambda < 1e-8L) {
        // At round-off level the merit can no longer decrease; accept if the step is negligible.
        real step = 0.0L;
        for (real v : delta) step = std::max(step, std::fabs(v));
        if (step <= p.tolerance) return u;
        throw NumericalError("radial Newton line search stalled");
      }
    }
    real step = 0.0L;
    for (int i = 0; i < M; ++i) step = std::max(step, std::fabs(lambda * delta[i]));
    u.swap(trial);
    g.swap(g_trial);
    quiet = step <= p.tolerance ? quiet + 1 : 0;
    if (quiet >= 2) {
      ++iterations;
      return u;
    }
  }
  throw NumericalError("radial Newton did not converge in " + std::to_string(p.max_iterations) + " iterations");
}

/// Richardson extrapolation of u on the mesh with `intervals` intervals.
std::vector<real> extrapolated(const RadialProblem& p, int intervals, int& iterations) {
  const Mesh coarse = build_mesh(p, intervals), fine = build_mesh(p, 2 * intervals);
  int ignored = 0;
  const std::vector<real> uc = newton(coarse, p, ignored);
  const std::vector<real> uf = newton(fine, p, iterations);
  std::vector<real> u(intervals + 1);
  for (int i = 0; i <= intervals; ++i) u[i] = (4.0L * uf[2 * i] - uc[i]) / 3.0L;
  return u;
}

double lagrange4(const std::vector<double>& x, const std::vector<double>& y, double t) {
  const int n = static_cast<int>(x.size());
  int k = static_cast<int>(std::upper_bound(x.begin(), x.end(), t) - x.begin()) - 2;
  k = std::clamp(k, 0, n - 4);
  double result = 0.0;
  for (int a = 0; a < 4; ++a) {
    double basis = 1.0;
    for (int c = 0; c < 4; ++c)
      if (c != a) basis *= (t - x[k + c]) / (x[k + a] - x[k + c]);
    result += basis * y[k + a];
  }
  return result;
}

/// Composite Simpson in the mesh coordinate ξ of f(r) r dr.
double integrate_r(const RadialProfile& prof, const std::vector<double>& f) {
  const RadialProblem& p = prof.problem;
  const int M = static_cast<int>(prof.r.size()) - 1;
  const double kappa = p.clustering, scale = p.r_max * kappa / std::sinh(kappa);
  const double dxi = 1.0 / M;
  double sum = 0.0;
  for (int i = 0; i <= M; ++i) {
    const double jac = scale * std::cosh(kappa * i * dxi);
    const double weight = (i == 0 || i == M) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += weight * f[i] * prof.r[i] * jac;
  }
  return sum * dxi / 3.0;
}

/// du/dr at nodes: three-point nonuniform differences, zero at the origin.
std::vector<double> derivative(const std::vector<double>& r, const std::vector<double>& u) {
  const int M = static_cast<int>(r.size()) - 1;
  std::vector<double> d(M + 1, 0.0);
  for (int i = 1; i < M; ++i) {
    const double hl = r[i] - r[i - 1], hr = r[i + 1] - r[i];
    d[i] = (-hr / (hl * (hl + hr))) * u[i - 1] + ((hr - hl) / (hl * hr)) * u[i] + (hl / (hr * (hl + hr))) * u[i + 1];
  }
  const double h1 = r[M] - r[M - 1], h2 = r[M - 1] - r[M - 2];
  d[M] = ((2.0 * h1 + h2) / (h1 * (h1 + h2))) * u[M] - ((h1 + h2) / (h1 * h2)) * u[M - 1] +
         (h1 / (h2 * (h1 + h2))) * u[M - 2];
  return d;
}

}  // namespace

void RadialProblem::validate() const {
  if (multiplicity < 1) throw ConfigError("n", "multiplicity must be >= 1");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ConfigError("mu", "must be a positive number");
  if (!(r_max > 0.0) || !std::isfinite(r_max)) throw ConfigError("rmax", "must be positive");
  if (nodes < 16 || nodes % 2 != 0) throw ConfigError("nodes", "must be an even integer >= 16");
  if (!(clustering > 0.0)) throw ConfigError("clustering", "must be positive");
  if (!(tolerance > 0.0)) throw ConfigError("tolerance", "must be positive");
  if (max_iterations < 1) throw ConfigError("max_iterations", "must be >= 1");
  if (!metric.is_radial()) throw ConfigError("metric", "the radial reduction needs a radially symmetric metric");
  try {
    (void)metric.radial_value(r_max);
  } catch (const RangeError&) {
    throw ConfigError("metric.radii", "radial table does not reach r_max");
  }
}

RadialProfile solve_radial(const RadialProblem& problem) {
  problem.validate();
  RadialProfile prof;
  prof.problem = problem;
  const int M = problem.nodes;
  int iterations = 0;
  const std::vector<real> u = extrapolated(problem, M, iterations);
  int ignored = 0;
  const std::vector<real> u_half = extrapolated(problem, M / 2, ignored);
  prof.iterations = iterations;

  const Mesh mesh = build_mesh(problem, M);
  prof.r.resize(M + 1);
  prof.u.resize(M + 1);
  prof.w.resize(M + 1);
  prof.bfield.resize(M + 1);
  for (int i = 0; i <= M; ++i) {
    prof.r[i] = static_cast<double>(mesh.r[i]);
    prof.u[i] = static_cast<double>(u[i]);
    const real w = mesh.u0[i] + u[i];
    prof.w[i] = static_cast<double>(w);
    const real t = std::exp(w);
    prof.bfield[i] = static_cast<double>(0.5L * t * (1.0L - t));
  }
  for (int i = 1; i <= M / 2; ++i)
    prof.refinement_change =
        std::max(prof.refinement_change, static_cast<double>(std::fabs(u[2 * i] - u_half[i])));
  return prof;
}

double RadialProfile::u_at(double radius) const {
  if (radius < 0.0 || radius > problem.r_max) throw RangeError("radius outside the oracle mesh");
  return lagrange4(r, u, radius);
}

double RadialProfile::w_at(double radius) const {
  return u_at(radius) - problem.multiplicity * std::log1p(problem.mu / (radius * radius));
}

double radial_flux(const RadialProfile& prof) {
  std::vector<double> f(prof.r.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = prof.bfield[i] * prof.problem.metric.radial_value(prof.r[i]);
  return 2.0 * std::numbers::pi * integrate_r(prof, f);
}

double radial_energy(const RadialProfile& prof) {
  const int n = prof.problem.multiplicity;
  const double mu = prof.problem.mu;
  const std::vector<double> du = derivative(prof.r, prof.u);
  std::vector<double> f(prof.r.size(), 0.0);
  for (std::size_t i = 1; i < f.size(); ++i) {
    const double r = prof.r[i], t = std::exp(prof.w[i]);
    const double dw = 2.0 * n * mu / (r * (r * r + mu)) + du[i];
    f[i] = 0.25 * prof.problem.metric.radial_value(r) * t * (1.0 - t) * (1.0 - t) + 0.25 * t * dw * dw;
  }
  return 2.0 * std::numbers::pi * integrate_r(prof, f);
}

double radial_decay_slope(const RadialProfile& prof, double r_min, double r_max) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t i = 0; i < prof.r.size(); ++i) {
    const double r = prof.r[i];
    if (r < r_min || r > r_max) continue;
    if (!(prof.w[i] < 0.0)) throw NumericalError("oracle w is not negative on the decay window");
    const double y = std::log(-prof.w[i]);
    sx += r;
    sy += y;
    sxx += r * r;
    sxy += r * y;
    ++count;
  }
  if (count < 2) throw NumericalError("decay window contains fewer than two oracle radii");
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

OracleComparison compare_with_2d(const RadialProfile& prof, const VortexField& field, int rays) {
  const auto& sites = field.vortices.sites();
  if (sites.size() != 1 || sites[0].location != Point{0.0, 0.0})
    throw ConfigError("vortices", "oracle comparison needs a single vortex at the origin");
  const int n = prof.problem.multiplicity;
  if (sites[0].multiplicity != n) throw ConfigError("vortices[0].n", "multiplicity differs from the oracle's");
  if (!(field.metric == prof.problem.metric)) throw ConfigError("metric", "metric differs from the oracle's");
  const double mu2 = field.vortices.mu(), mu1 = prof.problem.mu;

  OracleComparison out;
  out.radius = std::min(field.grid.half_width - 1.0, prof.problem.r_max);
  double weighted = 0.0, area = 0.0;
  for (std::size_t i = 0; i < prof.r.size() && prof.r[i] <= out.radius; ++i) {
    const double r = prof.r[i];
    // w2d - w1d = (u0 difference, analytic) + (u2d - u1d); finite at the origin.
    const double du0 = -n * (std::log(r * r + mu2) - std::log(r * r + mu1));
    const double lo = i == 0 ? 0.0 : 0.5 * (prof.r[i - 1] + r);
    const double hi = i + 1 < prof.r.size() ? 0.5 * (r + prof.r[i + 1]) : r;
    const double ring_area = (hi * hi - lo * lo) / rays;
    const int count = i == 0 ? 1 : rays;
    for (int q = 0; q < count; ++q) {
      const double theta = 2.0 * std::numbers::pi * q / rays;
      const double dev = std::fabs(du0 + field.u_at({r * std::cos(theta), r * std::sin(theta)}) - prof.u[i]);
      out.sup_deviation = std::max(out.sup_deviation, dev);
      const double a = i == 0 ? hi * hi : ring_area;
      weighted += a * dev * dev;
      area += a;
      ++out.samples;
    }
  }
  out.l2_deviation = std::sqrt(weighted / area);
  return out;
}

void write_profile_csv(const RadialProfile& prof, std::ostream& out) {
  out << "r,u,w,Bfield\n";
  char line[160];
  for (std::size_t i = 0; i < prof.r.size(); ++i) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", prof.r[i], prof.u[i], prof.w[i], prof.bfield[i]);
    out << line;
  }
}

}  // namespace csvortex
