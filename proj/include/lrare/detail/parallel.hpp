#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace lrare::detail {

// Runs fn(block_index, first, last) for every block of [0, n) on up to
// `workers` threads. Results come back indexed by block, so any reduction
// done in block order is independent of scheduling. The first exception
// (in block order) is rethrown after all threads join.
template <class Result, class Fn>
std::vector<Result> run_blocks(std::size_t n, std::size_t block_size,
                               std::size_t workers, Fn&& fn) {
  block_size = std::max<std::size_t>(block_size, 1);
  const std::size_t blocks = (n + block_size - 1) / block_size;
  std::vector<Result> results(blocks);
  std::vector<std::exception_ptr> errors(blocks);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t b = next++; b < blocks; b = next++) {
      const std::size_t first = b * block_size;
      const std::size_t last = std::min(n, first + block_size);
      try {
        results[b] = fn(b, first, last);
      } catch (...) {
        errors[b] = std::current_exception();
      }
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(blocks, 1));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

}  // namespace lrare::detail
