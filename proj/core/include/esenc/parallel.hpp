#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace esenc {

//! Runs task(0..n_tasks-1) across n_workers threads.  Tasks must write only
//! to their own output slots; results are then independent of the worker
//! count.  The first captured exception is rethrown after all workers join.
inline void parallel_for(int n_tasks, int n_workers,
                         const std::function<void(int)>& task) {
  if (n_tasks <= 0) return;
  if (n_workers <= 0) {
    n_workers = static_cast<int>(std::thread::hardware_concurrency());
    if (n_workers <= 0) n_workers = 1;
  }
  n_workers = std::min(n_workers, n_tasks);
  if (n_workers == 1) {
    for (int i = 0; i < n_tasks; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (int w = 0; w < n_workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n_tasks) return;
        try {
          task(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace esenc
