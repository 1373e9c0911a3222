#pragma once

#include <cstddef>
#include <functional>

namespace harmo {

// HARMO_WORKERS when set to a positive integer, else the hardware
// concurrency (at least 1).
int worker_count();

// Calls fn(begin, end) on contiguous chunks of [0, count) from up to
// worker_count() threads. Exceptions from any chunk are rethrown (first one).
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& fn);

// Runs task(i) for i in [0, count) on up to worker_count() threads, one
// index at a time. Tasks must not throw. Inside a pool thread both helpers
// run inline.
void parallel_tasks(std::size_t count, const std::function<void(std::size_t)>& task);

}  // namespace harmo
