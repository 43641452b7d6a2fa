#pragma once

#include <cstddef>
#include <functional>

namespace tce {

/// Upper bound on worker threads used by every parallel stage. Defaults to
/// the hardware concurrency; 0 restores the default.
void set_thread_count(unsigned count);
unsigned thread_count();

/// Runs task(i) for i in [0, count). Tasks may run concurrently; callers
/// write results into per-index slots so the outcome is independent of the
/// schedule. The first exception thrown by any task is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task);

}  // namespace tce
