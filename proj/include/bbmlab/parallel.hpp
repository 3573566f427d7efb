#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bbmlab {

/// Evaluates fn(i) for i in [0, count) on `workers` threads. Threads claim
/// fixed batches of indices from a shared counter; results land at their index,
/// so the output never depends on the worker count or on scheduling. The first
/// exception thrown by any fn is rethrown after all threads stop.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::int64_t count, int workers, std::int64_t batch_size, Fn&& fn) {
  std::vector<T> out(static_cast<std::size_t>(std::max<std::int64_t>(count, 0)));
  if (count <= 0) return out;
  batch_size = std::max<std::int64_t>(batch_size, 1);
  const std::int64_t batches = (count + batch_size - 1) / batch_size;
  std::atomic<std::int64_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto work = [&] {
    for (;;) {
      const std::int64_t b = next.fetch_add(1);
      if (b >= batches || stop.load()) return;
      try {
        const std::int64_t end = std::min(count, (b + 1) * batch_size);
        for (std::int64_t i = b * batch_size; i < end; ++i) out[static_cast<std::size_t>(i)] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        stop = true;
        return;
      }
    }
  };

  const int n = static_cast<int>(std::clamp<std::int64_t>(workers, 1, batches));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace bbmlab
