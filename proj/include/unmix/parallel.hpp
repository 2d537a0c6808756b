#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace unmix {

// Splits [begin, end) into contiguous blocks, one per worker. Callers must
// make per-index work independent; determinism then follows from the
// counter-based RNG streams.
inline void parallel_for(int begin, int end, int threads,
                         const std::function<void(int)>& body) {
  int n = end - begin;
  if (threads <= 1 || n < 2 * threads) {
    for (int i = begin; i < end; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  int chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    int lo = begin + t * chunk;
    int hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (int i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace unmix
