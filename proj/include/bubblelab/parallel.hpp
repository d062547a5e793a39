#pragma once
#include <cstddef>
#include <functional>

namespace bl {

// Worker count: BUBBLELAB_THREADS if set (>= 1), otherwise the hardware concurrency.
int worker_count();

// Runs f(0..count-1) on up to worker_count() threads. Results must be written to
// per-index slots by the caller, which keeps the outcome independent of scheduling.
// The exception of the lowest failing index is rethrown after all tasks finish.
void parallel_for(size_t count, const std::function<void(size_t)>& f);

}  // namespace bl
