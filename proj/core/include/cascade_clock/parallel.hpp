#pragma once

#include <cstddef>
#include <functional>

namespace cascade_clock {

/// Worker count: hardware concurrency, capped by CASCADE_CLOCK_THREADS when set.
unsigned worker_count();

/// Calls body(i) for i in [0, count) across worker_count() threads. Each index
/// runs exactly once; callers write into per-index slots and reduce in index
/// order so results do not depend on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace cascade_clock
