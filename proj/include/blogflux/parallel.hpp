// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace blogflux {

// Runs fn(chunk) for chunk in [0, chunks) on up to `threads` workers. Chunk
// boundaries are chosen by the caller, so results do not depend on the
// worker count as long as each chunk writes only its own slot.
template <class Fn>
void parallel_chunks(std::size_t chunks, int threads, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(chunks, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) fn(c);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t c = w; c < chunks; c += workers) fn(c);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// [begin, end) of chunk c when n items are cut into `chunks` near-equal parts.
inline std::pair<std::size_t, std::size_t> chunk_range(std::size_t n, std::size_t chunks,
                                                       std::size_t c) {
  return {n * c / chunks, n * (c + 1) / chunks};
}

}  // namespace blogflux
