#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace procam {

/// Number of worker threads used by row-parallel loops when the caller does
/// not ask for a specific count.
inline unsigned default_thread_count() {
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Splits [0, rows) into contiguous bands and calls body(begin, end) for each
/// band, one band per thread (0 = default_thread_count()). Bands are
/// deterministic for a given thread count.
/// The first exception thrown by any band is rethrown on the calling thread.
inline void parallel_for_rows(int rows, unsigned threads,
                              const std::function<void(int, int)>& body) {
  if (rows <= 0) {
    return;
  }
  if (threads == 0) {
    threads = default_thread_count();
  }
  threads = std::clamp(threads, 1u, static_cast<unsigned>(rows));
  if (threads == 1) {
    body(0, rows);
    return;
  }
  std::vector<std::thread> workers;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  workers.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    const int begin = static_cast<int>(static_cast<long long>(rows) * t / threads);
    const int end = static_cast<int>(static_cast<long long>(rows) * (t + 1) / threads);
    workers.emplace_back([&, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
        }
      }
    });
  }
  for (auto& worker : workers) {
    worker.join();
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
}

}  // namespace procam
