#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace zip3 {

inline int resolve_thread_count(int n_threads) {
  if (n_threads > 0) return n_threads;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 4;
}

// Runs task(i) for i in [0, n_tasks) on a pool of workers. Each task must
// write only to its own output slot, so the combined result is identical
// for any worker count. The first exception thrown by a task is rethrown
// on the calling thread after all workers join.
inline void parallel_for(long n_tasks, int n_threads,
                         const std::function<void(long)>& task) {
  if (n_tasks <= 0) return;
  const int workers = std::min<long>(resolve_thread_count(n_threads), n_tasks);
  if (workers <= 1) {
    for (long i = 0; i < n_tasks; ++i) task(i);
    return;
  }

  std::atomic<long> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      const long i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n_tasks || failed.load(std::memory_order_relaxed)) return;
      try {
        task(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace zip3
