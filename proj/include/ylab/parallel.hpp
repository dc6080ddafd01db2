#pragma once

#include <cstddef>
#include <functional>

namespace ylab {

// Number of workers: min(hardware_concurrency, YLAB_THREADS if set).
std::size_t worker_count();

// Runs fn(i) for i in [0, n). Work is pulled from a shared atomic index, so
// results must only depend on i (callers key RNG substreams by i). Falls back
// to a serial loop for n < 2 or a single worker.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace ylab
