#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace twoway {

inline unsigned hardware_lanes() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Calls fn(i) for i in [0, n) on up to `lanes` threads (0 = all hardware
/// threads). Callers write results to slot i, so the outcome does not depend
/// on scheduling. The first exception thrown by fn is rethrown.
template <class Fn>
void parallel_for(std::size_t n, unsigned lanes, Fn&& fn) {
  if (n == 0) return;
  const std::size_t workers = std::min<std::size_t>(lanes == 0 ? hardware_lanes() : lanes, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace twoway
