#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace nibblepack {

// Partitions [0, count) into at most `threads` contiguous chunks and runs
// fn(chunk, begin, end) on each. Callers merge per-chunk results in chunk
// order; combined with counter-based randomness this keeps every result
// independent of the thread count. fn must not throw.
inline void parallel_chunks(size_t count, int threads,
                            const std::function<void(size_t, size_t, size_t)>& fn) {
  if (count == 0) return;
  size_t workers = threads < 1 ? 1 : static_cast<size_t>(threads);
  workers = std::min(workers, count);
  if (workers == 1) {
    fn(0, 0, count);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  size_t base = count / workers, extra = count % workers, begin = 0;
  for (size_t c = 0; c < workers; ++c) {
    size_t len = base + (c < extra ? 1 : 0);
    pool.emplace_back(fn, c, begin, begin + len);
    begin += len;
  }
  for (auto& t : pool) t.join();
}

}  // namespace nibblepack
