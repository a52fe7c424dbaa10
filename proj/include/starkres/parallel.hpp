#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace starkres {

// Evaluates fn(i) for i in [0, n) on up to `threads` workers. Results land in
// index order, so the output does not depend on scheduling. The first
// exception (lowest index) is rethrown after all workers stop.
template <class Fn>
auto parallel_map(std::size_t n, int threads, Fn&& fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using R = decltype(fn(std::size_t{}));
  std::vector<R> out(n);
  int workers = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t bad_index = n;
  std::exception_ptr bad;
  auto work = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < bad_index) {
          bad_index = i;
          bad = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (bad) std::rethrow_exception(bad);
  return out;
}

}  // namespace starkres
