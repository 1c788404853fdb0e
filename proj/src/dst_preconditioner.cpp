#include "dst_preconditioner.hpp"

#include <cmath>
#include <mutex>
#include <numbers>

namespace csvortex::detail {
namespace {
// FFTW planning is not thread safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

DirichletHelmholtzSolver::DirichletHelmholtzSolver(int m, double spacing, double mass, double scale)
    : m_(m), inverse_eigen_(static_cast<std::size_t>(m) * m) {
  std::vector<double> lambda(m);
  for (int k = 0; k < m; ++k)
    lambda[k] = (2.0 - 2.0 * std::cos(std::numbers::pi * (k + 1) / (m + 1))) / (spacing * spacing);
  // RODFT00 applied twice per axis scales by 2(m + 1).
  const double norm = 4.0 * (m + 1.0) * (m + 1.0);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i)
      inverse_eigen_[static_cast<std::size_t>(j) * m + i] = 1.0 / (scale * (lambda[i] + lambda[j] + mass) * norm);
  std::lock_guard lock(planner_mutex());
  buffer_ = fftw_alloc_real(static_cast<std::size_t>(m) * m);
  plan_ = fftw_plan_r2r_2d(m, m, buffer_, buffer_, FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
}

DirichletHelmholtzSolver::~DirichletHelmholtzSolver() {
  std::lock_guard lock(planner_mutex());
  if (plan_) fftw_destroy_plan(plan_);
  if (buffer_) fftw_free(buffer_);
}

void DirichletHelmholtzSolver::apply(std::span<const double> rhs, std::span<double> out) {
  const std::size_t n = inverse_eigen_.size();
  for (std::size_t k = 0; k < n; ++k) buffer_[k] = rhs[k];
  fftw_execute(plan_);
  for (std::size_t k = 0; k < n; ++k) buffer_[k] *= inverse_eigen_[k];
  fftw_execute(plan_);
  for (std::size_t k = 0; k < n; ++k) out[k] = buffer_[k];
}

}  // namespace csvortex::detail
