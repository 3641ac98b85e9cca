#pragma once
// Minimal fork-join helper. Work items are split into contiguous chunks, one
// per worker; each item writes only to its own output slot, so results are
// identical for any worker count.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ggbm {

inline unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// body(begin, end) is invoked once per chunk; chunks partition [0, n).
template <class Body>
void parallel_chunks(std::size_t n, unsigned workers, Body&& body) {
  workers = resolve_workers(workers);
  if (n == 0) return;
  const std::size_t n_chunks = std::min<std::size_t>(workers, n);
  if (n_chunks <= 1) {
    body(std::size_t{0}, n);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(n_chunks);
  const std::size_t base = n / n_chunks;
  const std::size_t extra = n % n_chunks;
  std::size_t begin = 0;
  for (std::size_t c = 0; c < n_chunks; ++c) {
    const std::size_t len = base + (c < extra ? 1 : 0);
    const std::size_t end = begin + len;
    pool.emplace_back([&, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
    begin = end;
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace ggbm
