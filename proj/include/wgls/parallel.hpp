#pragma once

#include <cstddef>
#include <functional>

namespace wgls {

/// Number of worker threads: WGLS_THREADS if set (>= 1), else the hardware concurrency.
std::size_t worker_count();

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunks are disjoint, so bodies that
/// write only to their own indices produce schedule-independent results.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

} // namespace wgls
