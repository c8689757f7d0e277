#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace flowsmp {

// Runs fn(begin, end) over fixed-size blocks of [0, n). The block partition
// depends only on n, never on the worker count, and workers write disjoint
// ranges, so results are identical for any number of threads.
inline void parallel_blocks(std::size_t n, int threads,
                            const std::function<void(std::size_t, std::size_t)>& fn,
                            std::size_t block = 64) {
  if (n == 0) return;
  const std::size_t nblocks = (n + block - 1) / block;
  if (threads <= 1 || nblocks == 1) {
    fn(0, n);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t bi = next.fetch_add(1);
      if (bi >= nblocks) return;
      const std::size_t lo = bi * block;
      const std::size_t hi = std::min(n, lo + block);
      fn(lo, hi);
    }
  };
  const int nw = std::min<int>(threads, static_cast<int>(nblocks));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nw));
  for (int i = 0; i < nw; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

}  // namespace flowsmp
