#include "grl/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace grl {

namespace {
int g_threads = 0;  // 0 = uninitialized

int default_threads() {
  if (const char* env = std::getenv("GRL_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}
}  // namespace

void set_thread_count(int n) { g_threads = n > 0 ? n : 0; }

int thread_count() {
  if (g_threads == 0) g_threads = default_threads();
  return g_threads;
}

void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn) {
  int nt = thread_count();
  if (nt <= 1 || n < 256) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  const std::int64_t chunk = 64;
  auto worker = [&]() {
    for (;;) {
      std::int64_t lo = next.fetch_add(chunk);
      if (lo >= n) return;
      std::int64_t hi = std::min(lo + chunk, n);
      for (std::int64_t i = lo; i < hi; ++i) fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(nt));
  for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace grl
