#pragma once

#include <cstddef>
#include <functional>

namespace coda {

/// Number of worker threads (hardware concurrency, overridable via the
/// CODA_THREADS environment variable; "1" forces serial execution).
std::size_t worker_count();

/// Runs fn(i) for i in [0, n). Tasks must write to disjoint slots; each
/// task should derive its own RNG stream from its index so that results
/// are independent of the thread schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace coda
