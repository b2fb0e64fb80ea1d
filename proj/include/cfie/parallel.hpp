#pragma once

#include <functional>

namespace cfie {

// Worker count: CFIE_THREADS if set and positive, else hardware concurrency.
int worker_count();

// Runs body(worker, i) for i in [0, n). Index i goes to worker i % workers, so
// the work split does not depend on timing.
void parallel_for(int n, const std::function<void(int, int)>& body);

}  // namespace cfie
