#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace rwl {

/// Splits [0, n) into contiguous chunks and runs fn(begin, end) on up to
/// `threads` workers. threads <= 1 runs inline, which keeps results bitwise
/// reproducible.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  if (threads <= 1 || n < 2) {
    fn(std::size_t{0}, n);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, n);
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t b = w * chunk;
    const std::size_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&fn, b, e] { fn(b, e); });
  }
}

}  // namespace rwl
