#include "specgraph/parallel.hpp"

namespace specgraph {
namespace {

std::atomic<int> g_default_workers{0};

}  // namespace

int default_workers() {
  const int configured = g_default_workers.load(std::memory_order_relaxed);
  if (configured > 0) return configured;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void set_default_workers(int workers) {
  g_default_workers.store(workers > 0 ? workers : 0, std::memory_order_relaxed);
}

}  // namespace specgraph
