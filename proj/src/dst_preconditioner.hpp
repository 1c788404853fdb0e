#pragma once

#include <fftw3.h>

#include <span>
#include <vector>

namespace csvortex::detail {

/// Solves scale·(-Δh + mass)·x = y on an m×m cell grid with zero ghosts,
/// diagonalizing the five-point Laplacian with a type-I sine transform.
class DirichletHelmholtzSolver {
 public:
  DirichletHelmholtzSolver(int m, double spacing, double mass, double scale);
  ~DirichletHelmholtzSolver();
  DirichletHelmholtzSolver(const DirichletHelmholtzSolver&) = delete;
  DirichletHelmholtzSolver& operator=(const DirichletHelmholtzSolver&) = delete;

  void apply(std::span<const double> rhs, std::span<double> out);

 private:
  int m_;
  std::vector<double> inverse_eigen_;
  double* buffer_ = nullptr;
  fftw_plan plan_ = nullptr;
};

}  // namespace csvortex::detail
