#include "radtex/parallel.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace radtex {

namespace {
int g_threads = 1;
}

void set_num_threads(int n) {
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  g_threads = n < 1 ? 1 : n;
}

int num_threads() { return g_threads; }

void parallel_chunks(int n, int chunk_size, const std::function<void(int, int)>& fn) {
  if (n <= 0) return;
  const int nchunks = (n + chunk_size - 1) / chunk_size;
  if (g_threads <= 1 || nchunks <= 1) {
    for (int c = 0; c < nchunks; ++c)
      fn(c * chunk_size, std::min(n, (c + 1) * chunk_size));
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      int c = next.fetch_add(1);
      if (c >= nchunks) return;
      fn(c * chunk_size, std::min(n, (c + 1) * chunk_size));
    }
  };
  std::vector<std::thread> pool;
  const int nt = std::min(g_threads, nchunks);
  pool.reserve(static_cast<size_t>(nt - 1));
  for (int i = 1; i < nt; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

}  // namespace radtex
