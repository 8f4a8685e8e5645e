#pragma once

#include <cstddef>
#include <functional>

namespace nctf {

// Worker cap: NCTF_NUM_THREADS if set and positive, else hardware concurrency.
unsigned num_threads();

// Calls fn(begin, end) on disjoint contiguous chunks of [0, n). Chunks never
// share output locations, so results do not depend on the thread count.
void parallel_for(std::size_t n, std::size_t min_chunk,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace nctf
