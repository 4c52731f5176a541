#pragma once

#include <cstddef>
#include <cstdint>

#include <omp.h>

namespace shaperet {

/// Selects between the OpenMP kernel and its serial reference.
///
/// Every kernel that accepts an `Exec` produces bit-identical output for both
/// values and for any OpenMP thread count: parallel loops only write
/// per-index results, and reductions accumulate over a fixed block partition
/// that does not depend on the number of workers.
enum class Exec { Serial, Parallel };

/// Fixed block width for deterministic reductions.
inline constexpr std::size_t kReductionBlock = 4096;

template <typename Fn>
void parallel_for(std::size_t n, Exec exec, Fn&& fn) {
  if (exec == Exec::Serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < count; ++i) fn(static_cast<std::size_t>(i));
}

/// Scoped override of the OpenMP worker count.
class ThreadCountGuard {
 public:
  explicit ThreadCountGuard(int threads) : previous_(omp_get_max_threads()) {
    if (threads > 0) omp_set_num_threads(threads);
  }
  ~ThreadCountGuard() { omp_set_num_threads(previous_); }
  ThreadCountGuard(const ThreadCountGuard&) = delete;
  ThreadCountGuard& operator=(const ThreadCountGuard&) = delete;

 private:
  int previous_;
};

}  // namespace shaperet
