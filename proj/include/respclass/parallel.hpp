#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace respclass {

// Worker cap: hardware concurrency, clamped by the RESPCLASS_THREADS
// environment variable (when set and positive) and by max_threads (when
// positive).
int effective_thread_count(int max_threads, std::size_t n_tasks);

// Runs fn(0..n_tasks-1) across a small worker pool. fn must not throw;
// callers wanting per-task failure capture wrap their own try/catch.
void parallel_for(std::size_t n_tasks, int max_threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace respclass
