#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace coatlab {

// Worker count; honours COATLAB_THREADS, otherwise hardware concurrency.
unsigned thread_count();

// Runs body(i) for i in [0, n). Work is split into contiguous blocks, so any
// per-index output written by body is independent of the thread count.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t block = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * block;
    const std::size_t hi = std::min(n, lo + block);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace coatlab
