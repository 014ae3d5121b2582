#include "rwre/parallel.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace rwre {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for_chunked(
    std::int64_t count, int threads,
    const std::function<void(std::int64_t, std::int64_t)>& fn) {
  if (count <= 0) return;
  const int workers =
      std::min<std::int64_t>(std::max(1, threads), count);
  if (workers == 1) {
    fn(0, count);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const std::int64_t chunk = (count + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const std::int64_t begin = w * chunk;
    const std::int64_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace rwre
