#pragma once

#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace toepricc {

/// Number of worker threads internal loops may use. Controlled by the
/// TOEPRICC_THREADS environment variable; unset or 0 means one thread per
/// hardware core.
inline std::size_t thread_budget() {
  const std::size_t hw =
      std::max<std::size_t>(1, std::thread::hardware_concurrency());
  const char* env = std::getenv("TOEPRICC_THREADS");
  if (!env || !*env) return hw;
  char* end = nullptr;
  const long parsed = std::strtol(env, &end, 10);
  if (end == env || parsed <= 0) return hw;
  return static_cast<std::size_t>(parsed);
}

/// Runs body(i) for i in [0, count). The body must only write state owned
/// by index i; results are then independent of the scheduling, so callers
/// stay deterministic. Exceptions from the body are rethrown on the calling
/// thread.
template <typename Body>
void parallel_for(std::size_t count, Body&& body) {
  const std::size_t workers = std::min(thread_budget(), count);
  if (workers <= 1 || count < 4) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (std::thread& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace toepricc
