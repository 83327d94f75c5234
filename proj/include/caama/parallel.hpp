#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace caama {

// Deterministic fan-out: the range is split into a fixed number of chunks
// (independent of the thread count), each chunk is reduced sequentially, and
// chunk results are combined in index order. Two runs therefore reduce in
// exactly the same order regardless of scheduling.
inline constexpr int kReduceChunks = 8;

// body(chunk_index, begin, end) is called once per chunk.
inline void for_each_chunk(int count,
                           const std::function<void(int, int, int)>& body,
                           int threads = 0) {
  if (count <= 0) return;
  const int chunks = std::min(kReduceChunks, count);
  const int per = (count + chunks - 1) / chunks;
  if (threads <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    threads = hw > 0 ? static_cast<int>(hw) : 1;
  }
  threads = std::min(threads, chunks);
  if (threads <= 1) {
    for (int c = 0; c < chunks; ++c)
      body(c, c * per, std::min(count, (c + 1) * per));
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (int c = t; c < chunks; c += threads)
        body(c, c * per, std::min(count, (c + 1) * per));
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace caama
