#include "respclass/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace respclass {

int effective_thread_count(int max_threads, std::size_t n_tasks) {
  if (n_tasks == 0) return 0;
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  long limit = static_cast<long>(hw);

  if (const char* env = std::getenv("RESPCLASS_THREADS")) {
    char* end = nullptr;
    const long parsed = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && parsed > 0) {
      limit = std::min(limit, parsed);
    }
  }
  if (max_threads > 0) limit = std::min(limit, static_cast<long>(max_threads));
  limit = std::min(limit, static_cast<long>(n_tasks));
  return static_cast<int>(std::max(limit, 1L));
}

void parallel_for(std::size_t n_tasks, int max_threads,
                  const std::function<void(std::size_t)>& fn) {
  const int workers = effective_thread_count(max_threads, n_tasks);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n_tasks; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  auto drain = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n_tasks) return;
      fn(i);
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers - 1));
  for (int w = 1; w < workers; ++w) pool.emplace_back(drain);
  drain();
  for (std::thread& t : pool) t.join();
}

}  // namespace respclass
