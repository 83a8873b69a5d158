#pragma once
/// Minimal static-schedule parallel loop. Each index is processed exactly
/// once by a thread chosen from a fixed partition, so results written to
/// per-index slots do not depend on the thread count.

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace trbie {

namespace detail {
inline std::atomic<int>& thread_setting() {
  static std::atomic<int> n{0};
  return n;
}

// Set inside workers so nested loops run serially on their thread.
inline bool& in_parallel_region() {
  thread_local bool flag = false;
  return flag;
}
}  // namespace detail

/// 0 selects the hardware concurrency.
inline void set_num_threads(int n) { detail::thread_setting().store(std::max(0, n)); }

inline int num_threads() {
  const int n = detail::thread_setting().load();
  if (n > 0) return n;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(i) for i in [0, n). The first exception thrown by any worker is
/// rethrown on the calling thread after all workers finish.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(num_threads()), n);
  if (nt <= 1 || detail::in_parallel_region()) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mtx;
  std::atomic<bool> failed{false};
  auto worker = [&](std::size_t t) {
    bool& flag = detail::in_parallel_region();
    const bool saved = flag;
    flag = true;
    try {
      // interleaved partition balances rows of uneven cost
      for (std::size_t i = t; i < n && !failed.load(std::memory_order_relaxed); i += nt) fn(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mtx);
      if (!error) error = std::current_exception();
      failed = true;
    }
    flag = saved;
  };
  std::vector<std::thread> pool;
  pool.reserve(nt - 1);
  for (std::size_t t = 1; t < nt; ++t) pool.emplace_back(worker, t);
  worker(0);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace trbie
