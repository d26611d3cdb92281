#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace cevm {

// Worker count: min(CEVM_THREADS, hardware_concurrency), at least 1.
// CEVM_THREADS affects speed only; all chunked loops below produce results
// that do not depend on the worker count.
inline int worker_count() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("CEVM_THREADS")) {
    long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && static_cast<unsigned>(cap) < hw) hw = static_cast<unsigned>(cap);
  }
  return static_cast<int>(hw);
}

// Runs body(chunk) for chunk = 0..n_chunks-1.  Chunks are claimed through an
// atomic counter, so any thread may run any chunk; the body must write only
// to chunk-indexed state for the result to be scheduling-independent.
inline void parallel_for_chunks(std::int64_t n_chunks,
                                const std::function<void(std::int64_t)>& body) {
  int workers = worker_count();
  if (workers <= 1 || n_chunks <= 1) {
    for (std::int64_t c = 0; c < n_chunks; ++c) body(c);
    return;
  }
  if (static_cast<std::int64_t>(workers) > n_chunks)
    workers = static_cast<int>(n_chunks);
  std::atomic<std::int64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::int64_t c = next.fetch_add(1);
        if (c >= n_chunks) break;
        body(c);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace cevm
