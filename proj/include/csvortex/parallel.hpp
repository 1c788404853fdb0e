#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace csvortex {

/// Number of worker threads for data-parallel loops. Initialized from the
/// CSVORTEX_WORKERS environment variable, defaulting to all cores.
int worker_count();
void set_worker_count(int workers);

/// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v))
      carry_ += (sum_ - t) + v;
    else
      carry_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// Sums `row_sum(j)` for j in [0, rows). Rows may be evaluated by any worker;
/// the partials are combined in row order, so the result does not depend on
/// the number of workers.
template <class RowSum>
double reduce_rows(int rows, RowSum&& row_sum) {
  std::vector<double> partial(static_cast<std::size_t>(rows));
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (int j = 0; j < rows; ++j) partial[static_cast<std::size_t>(j)] = row_sum(j);
  CompensatedSum total;
  for (double p : partial) total.add(p);
  return total.value();
}

template <class RowFn>
void for_rows(int rows, RowFn&& fn) {
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (int j = 0; j < rows; ++j) fn(j);
}

/// Compensated sum of `values` in fixed order.
double stable_sum(std::span<const double> values);

}  // namespace csvortex
