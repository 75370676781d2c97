#pragma once

#include <cstddef>
#include <functional>

namespace ectstat {

/// Worker count: ECTSTAT_THREADS if set and positive, else the hardware
/// concurrency (at least 1).
std::size_t default_thread_count();

/// Overrides the default for this process; 0 restores the environment rule.
void set_thread_count(std::size_t n);

/// Runs body(i) for i in [0, n) on up to default_thread_count() workers.
/// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace ectstat
