// Minimal static-partition parallel map over an index range.
//
// Work items write results keyed by index, so the output layout is
// independent of the worker count; reductions over the results must be
// done by the caller in fixed index order to stay deterministic.
#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace blochspec {

inline unsigned default_worker_count() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1u : n;
}

template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  if (workers > n) workers = static_cast<unsigned>(n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr first_error = nullptr;
  std::mutex err_mutex;
  std::atomic<std::size_t> next{0};
  const std::size_t chunk = 8;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t begin = next.fetch_add(chunk);
        if (begin >= n) return;
        const std::size_t end = std::min(n, begin + chunk);
        try {
          for (std::size_t i = begin; i < end; ++i) fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace blochspec
