#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace arlab {

/// Process-wide worker count used by the heavy kernels (1 = serial).
inline unsigned& worker_threads() {
  static unsigned n = 1;
  return n;
}

/// Runs fn(begin, end) over [0, n) split into fixed contiguous chunks.
/// Chunk boundaries depend only on n and the chunk count, and callers write
/// results into per-item slots, so outputs never depend on scheduling.
template <typename Fn>
void parallel_chunks(std::size_t n, Fn&& fn, unsigned threads = worker_threads()) {
  if (n == 0) return;
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace arlab
