#pragma once

#include <cstdint>
#include <functional>

namespace rwre {

int resolve_threads(int requested);

// Runs fn(begin, end) over a partition of [0, count) across up to `threads`
// workers. Callers write into disjoint per-index slots and derive per-index
// seeds, so results do not depend on the partition or scheduling.
void parallel_for_chunked(
    std::int64_t count, int threads,
    const std::function<void(std::int64_t, std::int64_t)>& fn);

}  // namespace rwre
