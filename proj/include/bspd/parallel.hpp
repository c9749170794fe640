// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace bspd {

inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Evaluates fn(i) for i in [0, count) on `threads` workers and returns the
// results in index order. The first failing index (lowest i) is rethrown once
// all workers have stopped.
template <class Fn>
auto parallel_map(std::size_t count, unsigned threads, Fn&& fn) {
  using R = std::invoke_result_t<Fn&, std::size_t>;
  std::vector<R> out(count);
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex err_mu;
  std::exception_ptr err;
  std::size_t err_index = count;
  auto work = [&] {
    while (!stop.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (i < err_index) {
          err_index = i;
          err = std::current_exception();
        }
        stop = true;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace bspd
