#pragma once

#include <functional>

namespace nsmc {

// Worker count: NSMC_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
int thread_budget();

// Runs body(0..n-1) across thread_budget() workers and joins before
// returning.  Indices are handed out atomically, so bodies with uneven cost
// balance themselves.  The first exception thrown by any body is rethrown
// on the calling thread after the join; remaining indices are abandoned.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace nsmc
