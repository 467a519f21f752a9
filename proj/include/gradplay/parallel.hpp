#pragma once

#include <cstddef>
#include <functional>

namespace gradplay {

/// Worker count: GRADPLAY_WORKERS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
int WorkerCount();

/// Runs body(i) for i in [0, count) across WorkerCount() threads. Callers
/// write results into per-index slots so reductions stay order-independent.
/// The first exception thrown by any task is rethrown after all workers join.
void ParallelFor(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace gradplay
