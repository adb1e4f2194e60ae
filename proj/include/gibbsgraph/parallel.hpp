#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gibbsgraph {

/// Worker count for parallel loops: the value set by set_thread_count, else
/// GIBBSGRAPH_THREADS, else the hardware concurrency (at least 1).
std::size_t thread_count();
void set_thread_count(std::size_t threads);  // 0 restores the default

namespace detail {
bool& inside_parallel_region();
}

/// Calls body(i) for i in [0, count) on up to thread_count() threads. Results
/// must be written by index, so the outcome does not depend on scheduling.
/// Nested calls run serially. The first exception thrown by any body is
/// rethrown after all workers stop.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
  const std::size_t workers = std::min(thread_count(), count);
  if (workers <= 1 || detail::inside_parallel_region()) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    detail::inside_parallel_region() = true;
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || failed.load()) break;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
    detail::inside_parallel_region() = false;
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace gibbsgraph
