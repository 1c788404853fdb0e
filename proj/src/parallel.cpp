#include "csvortex/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>

namespace csvortex {
namespace {

int initial_workers() {
  if (const char* env = std::getenv("CSVORTEX_WORKERS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  return std::max(1, omp_get_num_procs());
}

std::atomic<int>& workers() {
  static std::atomic<int> w{initial_workers()};
  return w;
}

}  // namespace

int worker_count() { return workers().load(std::memory_order_relaxed); }

void set_worker_count(int n) { workers().store(std::max(1, n), std::memory_order_relaxed); }

double stable_sum(std::span<const double> values) {
  CompensatedSum s;
  for (double v : values) s.add(v);
  return s.value();
}

}  // namespace csvortex
