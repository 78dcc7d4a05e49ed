#pragma once

#include <cstddef>
#include <functional>

namespace ggmrecon {

/// Worker count: GGM_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t thread_count();

/// Calls body(i) for i in [0, count), split over up to thread_count() threads.
/// Each index is visited exactly once; the first exception thrown by any
/// body is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace ggmrecon
