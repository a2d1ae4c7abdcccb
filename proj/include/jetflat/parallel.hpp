#pragma once

#include <cstddef>
#include <functional>

namespace jetflat {

/// Worker count: JETFLAT_THREADS if set and positive, else the hardware
/// concurrency (at least 1).
[[nodiscard]] unsigned worker_count();

/// Calls body(i) for i in [0, n) on up to worker_count() threads. Each index
/// runs exactly once; callers write results into slot i so the outcome does
/// not depend on scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace jetflat
