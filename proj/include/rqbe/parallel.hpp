#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace rqbe {

// Worker count used by the data-parallel loops; 0 selects the hardware
// concurrency.
void set_thread_count(int n);
int thread_count();

// Runs body(begin, end) over a static contiguous partition of [0, n). Each
// index is handled by exactly one worker in increasing order, so results do
// not depend on the worker count.
template <class F>
void parallel_for(std::size_t n, F&& body) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
  if (workers <= 1) {
    if (n > 0) body(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w)
    pool.emplace_back([&, w] { body(w * n / workers, (w + 1) * n / workers); });
  body(std::size_t{0}, n / workers);
  for (auto& t : pool) t.join();
}

}  // namespace rqbe
