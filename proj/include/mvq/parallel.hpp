#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace mvq {

namespace detail {
inline std::atomic<unsigned>& thread_cap() {
  static std::atomic<unsigned> v{0};
  return v;
}
}  // namespace detail

/// Process-wide worker cap. 0 = use hardware concurrency. Set once from the
/// CLI --threads flag; library callers may also set it directly.
inline void set_max_threads(unsigned n) { detail::thread_cap() = n; }
inline unsigned max_threads() {
  unsigned v = detail::thread_cap();
  if (v) return v;
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

/// Static block partition of [0, count) across worker threads. The result of
/// any computation using parallel_for must not depend on the partitioning:
/// workers write to disjoint slots or accumulate into per-chunk buffers that
/// the caller combines in index order.
inline void parallel_for(std::size_t count,
                         const std::function<void(std::size_t, std::size_t)>& body) {
  unsigned hw = max_threads();
  std::size_t nthreads = std::max<std::size_t>(1, std::min<std::size_t>(hw, count));
  if (nthreads == 1) {
    body(0, count);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr eptr;
  std::size_t chunk = (count + nthreads - 1) / nthreads;
  for (std::size_t t = 0; t < nthreads; ++t) {
    std::size_t lo = t * chunk;
    std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        body(lo, hi);
      } catch (...) {
        if (!eptr) eptr = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (eptr) std::rethrow_exception(eptr);
}

}  // namespace mvq
