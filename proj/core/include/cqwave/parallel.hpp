#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace cqwave {

/// Runs fn(i) for i in [0, count) on num_threads workers with fixed
/// contiguous chunking. Each index is processed exactly once and results
/// written by distinct indices must not alias, so the outcome is
/// deterministic and identical to the serial order. num_threads <= 1 runs
/// inline.
inline void parallel_for(int count, int num_threads,
                         const std::function<void(int)>& fn) {
  if (count <= 0) return;
  if (num_threads <= 1 || count == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  const int workers = std::min(num_threads, count);
  const int chunk = (count + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const int lo = w * chunk;
    const int hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (int i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace cqwave
