#pragma once

#include <cstddef>
#include <functional>

namespace distreg {

/// Worker count from DISTREG_THREADS (default 1).
std::size_t thread_count();

/// Calls fn(i) for i in [0, n), splitting the range into contiguous chunks
/// across thread_count() workers. fn must only write to slots owned by i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace distreg
