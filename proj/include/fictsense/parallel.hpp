#pragma once

#include <cstddef>
#include <functional>

namespace fictsense {

// Worker count for internal parallelism. FICTSENSE_THREADS caps it
// (0 or unset = hardware concurrency). Read on every call so the
// variable can change between runs within one process.
unsigned worker_threads();

// Runs fn(i) for every i in [0, n). Results must go to per-index slots;
// output is then independent of the schedule and thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace fictsense
