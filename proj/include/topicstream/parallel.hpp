#pragma once

#include <cstddef>
#include <functional>

namespace topicstream {

// Process-wide cap on worker threads. 0 means hardware concurrency.
void set_max_threads(unsigned n);
unsigned max_threads();

// Runs body(i) for i in [0, n) over up to max_threads() workers. Each index
// is processed exactly once; callers write results into slot i so the output
// does not depend on the thread count. The first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace topicstream
