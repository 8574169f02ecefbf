#pragma once

#include <cstddef>
#include <functional>

namespace hsvi {

// Worker count: hardware concurrency, capped by HESTON_SVI_THREADS when set.
unsigned worker_count();

// Runs body(i) for i in [0, n). Each index is visited exactly once; callers
// write results by index so output order never depends on scheduling. The
// exception from the lowest failing index is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace hsvi
