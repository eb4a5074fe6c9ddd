// Copyright 2026 The curbvote Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace curbvote {

/// 0 means "all hardware threads".
inline unsigned resolve_thread_count(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Splits [0, n) into contiguous blocks, one per worker, and calls
/// fn(begin, end) on each. Each output slot is owned by exactly one block, so
/// results never depend on the thread count. The first exception thrown by a
/// worker is rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(resolve_thread_count(threads), n);
  if (workers <= 1) {
    if (n > 0) fn(std::size_t{0}, n);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::size_t block = n / workers;
    const std::size_t extra = n % workers;
    std::size_t begin = 0;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t end = begin + block + (w < extra ? 1 : 0);
      pool.emplace_back([&, begin, end] {
        try {
          fn(begin, end);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
      begin = end;
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace curbvote
