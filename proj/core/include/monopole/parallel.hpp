#pragma once

#include <cstddef>
#include <functional>

namespace monopole {

/// Worker count: MONOPOLE_LAB_THREADS when set to a positive integer,
/// otherwise (unset or 0) the hardware concurrency.
std::size_t thread_count();

/// Splits [0, n) into contiguous blocks, one per worker, and calls
/// body(begin, end) on each. The first exception thrown by any block is
/// rethrown on the calling thread after all workers have joined.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace monopole
