#pragma once

#include <cstddef>
#include <functional>

namespace fracstick {

/// Process-wide cap on worker threads (>= 1).
void set_worker_count(int workers);
int worker_count();

/// Runs body(i) for i in [0, count). Work is split into contiguous chunks;
/// callers write results by index so the outcome never depends on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace fracstick
