#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace specgraph {

// Number of workers used when a caller passes 0. Defaults to the hardware
// concurrency; the CLI overrides it with --jobs.
int default_workers();
void set_default_workers(int workers);

inline int resolve_workers(int requested) {
  return requested > 0 ? requested : default_workers();
}

// Runs body(i) for i in [0, n) over a bounded pool of threads. Work is handed
// out in contiguous chunks of `grain` indices. Each body call must only write
// to state owned by index i, which keeps results independent of the worker
// count. If any call throws, the exception raised at the lowest index is
// rethrown after all workers have joined.
template <typename Body>
void parallel_for(std::size_t n, Body&& body, int workers = 0,
                  std::size_t grain = 64) {
  if (n == 0) return;
  grain = std::max<std::size_t>(grain, 1);
  const std::size_t chunks = (n + grain - 1) / grain;
  const auto threads = static_cast<std::size_t>(
      std::min<std::size_t>(static_cast<std::size_t>(resolve_workers(workers)),
                            chunks));

  std::exception_ptr first_error;
  std::size_t first_error_index = n;
  std::mutex error_mutex;

  auto run_chunk = [&](std::size_t chunk) {
    const std::size_t begin = chunk * grain;
    const std::size_t end = std::min(n, begin + grain);
    for (std::size_t i = begin; i < end; ++i) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (i < first_error_index) {
          first_error_index = i;
          first_error = std::current_exception();
        }
        return;
      }
    }
  };

  if (threads <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t c = next.fetch_add(1); c < chunks;
             c = next.fetch_add(1)) {
          run_chunk(c);
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace specgraph
