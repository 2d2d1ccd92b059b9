#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace bmsdp {

// Runs fn(i) for i in [0, count) on up to n_threads threads. Each index owns
// its output slot, so results are deterministic regardless of scheduling.
inline void parallel_for(long count, int n_threads, const std::function<void(long)>& fn) {
  n_threads = std::max(1, n_threads);
  if (n_threads == 1 || count <= 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(n_threads);
  const long per = (count + n_threads - 1) / n_threads;
  for (int t = 0; t < n_threads; ++t) {
    const long lo = t * per;
    const long hi = std::min(count, lo + per);
    if (lo >= hi) break;
    workers.emplace_back([&, lo, hi, t] {
      try {
        for (long i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace bmsdp
