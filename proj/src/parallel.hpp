#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace cowalk::detail {

inline constexpr std::uint64_t kChunk = 8192;

// Runs work(begin, end, acc) over [0, total) in fixed chunks. Each worker owns
// an accumulator and the accumulators are merged at the end, so with an
// order-insensitive merge (integer counts) the result does not depend on the
// number of threads or on scheduling.
template <class Acc, class Work, class Merge>
Acc parallel_chunks(std::uint64_t total, unsigned threads, const Acc& zero, Work work, Merge merge) {
  const std::uint64_t chunks = (total + kChunk - 1) / kChunk;
  const unsigned workers = static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(threads, chunks)));
  std::vector<Acc> partial(workers, zero);
  std::atomic<std::uint64_t> next{0};
  auto run = [&](unsigned w) {
    for (std::uint64_t c = next++; c < chunks; c = next++) {
      work(c * kChunk, std::min(total, (c + 1) * kChunk), partial[w]);
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }
  Acc out = zero;
  for (const Acc& p : partial) merge(out, p);
  return out;
}

}  // namespace cowalk::detail
