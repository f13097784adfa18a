#pragma once

#include <cstddef>
#include <functional>

namespace cbounds {

/// Worker count: `requested` if nonzero, else hardware concurrency; in both
/// cases capped by the CAUSAL_BOUNDS_THREADS environment variable when set.
std::size_t worker_count(std::size_t requested = 0);

/// Calls body(i) for i in [0, count) on up to `workers` threads. Each index is
/// visited exactly once; callers write results into slot i, so the outcome
/// does not depend on scheduling. The exception of the lowest failing index is rethrown.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& body);

}  // namespace cbounds
