#pragma once

#include <cstddef>
#include <functional>

namespace linfb {

// Worker count: LINFB_THREADS if set and positive, else hardware concurrency.
unsigned thread_count();

// Calls fn(i) for i in [0, n). Each index is handled exactly once; callers
// write results into per-index slots so output order never depends on
// scheduling. The first exception thrown by any fn is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace linfb
