#pragma once

#include <functional>

namespace radtex {

/// Process-wide worker count for parallel loops (0 = hardware concurrency,
/// 1 = serial).
/// Results are independent of this setting: work is split into fixed-size
/// chunks and any reductions merge chunks in index order.
void set_num_threads(int n);
int num_threads();

/// Calls fn(begin, end) over [0, n) in fixed chunks of chunk_size.
/// Chunk boundaries do not depend on the thread count.
void parallel_chunks(int n, int chunk_size, const std::function<void(int, int)>& fn);

}  // namespace radtex
