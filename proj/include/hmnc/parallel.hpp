#pragma once

#include <cstddef>
#include <functional>

namespace hmnc {

/// Worker count from HMNC_THREADS, else hardware concurrency (at least 1).
int default_thread_count();

/// Runs body(i) for i in [0, n) over `threads` workers with static contiguous
/// chunks. Callers write results into per-index slots so output never depends
/// on the worker count. The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace hmnc
