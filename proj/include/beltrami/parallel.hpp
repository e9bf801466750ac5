#pragma once

#include <functional>

namespace beltrami {

// Worker count: BELTRAMI_LAB_THREADS when set to a positive integer,
// otherwise the hardware concurrency.
int thread_count();

// Runs body(i) for i in [0, count). Callers write results by index, so the
// outcome does not depend on scheduling. The first exception (lowest index)
// is rethrown after all workers finish.
void parallel_for(int count, const std::function<void(int)>& body);

}  // namespace beltrami
