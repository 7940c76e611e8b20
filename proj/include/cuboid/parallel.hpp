#pragma once

#include <functional>

namespace cuboid {

/// Worker count: hardware concurrency, capped by CUBOID_COMPLEX_THREADS when
/// that variable holds a positive integer.
int worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. The first
/// exception thrown by any task is rethrown after all workers finish.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace cuboid
