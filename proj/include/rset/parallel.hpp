#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace rset {

namespace detail {
inline std::atomic<int> thread_count_setting{1};
inline thread_local bool in_parallel_region = false;
}

// Global worker count used by parallel_for. 0 means "hardware concurrency";
// the default is 1.
inline void set_thread_count(int n) { detail::thread_count_setting.store(n < 0 ? 1 : n); }
inline int thread_count() { return detail::thread_count_setting.load(); }

// Runs fn(i) for i in [0, n). Work is split into contiguous chunks, one per
// worker; fn must write only to slot-i state so the result is identical for
// any thread count.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  int workers = thread_count();
  if (workers <= 0) {
    unsigned hc = std::thread::hardware_concurrency();
    workers = hc == 0 ? 1 : static_cast<int>(hc);
  }
  // Nested regions run sequentially so an outer loop keeps the pool to itself.
  if (workers == 1 || n <= 1 || detail::in_parallel_region) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::size_t w = static_cast<std::size_t>(workers);
  if (w > n) w = n;
  std::vector<std::thread> pool;
  pool.reserve(w - 1);
  std::size_t chunk = (n + w - 1) / w;
  auto run_range = [&fn](std::size_t lo, std::size_t hi) {
    detail::in_parallel_region = true;
    for (std::size_t i = lo; i < hi; ++i) fn(i);
    detail::in_parallel_region = false;
  };
  for (std::size_t t = 1; t < w; ++t) {
    std::size_t lo = t * chunk;
    std::size_t hi = lo + chunk < n ? lo + chunk : n;
    if (lo >= hi) break;
    pool.emplace_back(run_range, lo, hi);
  }
  run_range(0, chunk < n ? chunk : n);
  for (auto& th : pool) th.join();
}

}  // namespace rset
