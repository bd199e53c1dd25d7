#pragma once

#include <cstddef>
#include <functional>

namespace vinedist {

// Worker count used when a distance computation is called with workers = 0:
// the VINEDIST_WORKERS environment variable if set, hardware concurrency
// otherwise. Results never depend on the worker count; only wall time does.
int default_workers();

// Runs fn(index, worker) for index = 0..n-1 across `workers` threads with
// dynamic scheduling. Exceptions are captured and rethrown on the caller.
void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t, int)>& fn);

}  // namespace vinedist
