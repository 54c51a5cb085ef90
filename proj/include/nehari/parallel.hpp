#pragma once

#include <cstddef>
#include <functional>

namespace nehari {

/// Worker cap: NEHARI_LAB_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. Callers write
/// results into slots indexed by i, so merging never depends on completion
/// order. After all workers have joined, the exception of the lowest
/// failing index (if any) is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace nehari
