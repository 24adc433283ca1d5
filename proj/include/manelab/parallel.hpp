#pragma once

#include <functional>

#include "manelab/errors.hpp"

namespace manelab {

// Worker count: hardware concurrency, capped by MANELAB_THREADS if set.
int thread_budget();

// Runs fn(begin, end) over [0, n) in chunks on the worker pool.  Work items
// must write to disjoint preallocated slots so results are identical for any
// thread count.
void parallel_chunks(long long n, long long chunk,
                     const std::function<void(long long, long long)>& fn);

} // namespace manelab
