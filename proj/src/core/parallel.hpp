#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace hjbtk {

inline unsigned effective_threads(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

// Runs fn(i) for i in [0,n). Work items write results into caller-owned,
// index-addressed storage, so reductions happen afterwards in index order and
// the outcome is independent of the thread count. If several items throw, the
// one with the lowest index is rethrown (deterministic error selection).
inline void parallel_for_indexed(std::size_t n, unsigned threads,
                                 const std::function<void(std::size_t)>& fn) {
  const unsigned workers = std::min<std::size_t>(effective_threads(threads), n == 0 ? 1 : n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < n; ++i)
    if (errors[i]) std::rethrow_exception(errors[i]);
}

}  // namespace hjbtk
