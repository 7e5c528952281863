#pragma once

#include <functional>

namespace parmx {

/// Run body(i) for i in [0, n) on up to `jobs` threads. Each index owns its output
/// slot, so results are deterministic regardless of scheduling. jobs <= 1 runs inline.
/// Exceptions from workers are rethrown on the calling thread (first one wins).
void parallel_for(int n, int jobs, const std::function<void(int)>& body);

/// Default worker count (hardware concurrency, at least 1).
int default_jobs();

}  // namespace parmx
