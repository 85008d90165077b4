#pragma once

#include <cstddef>
#include <functional>

namespace dregsim {

// Worker count: `requested` if nonzero, else DREGSIM_THREADS, else the
// hardware concurrency.
unsigned resolve_threads(unsigned requested = 0);

// Calls fn(i) for i in [0, count) on up to `threads` workers. Indices are
// handed out dynamically; callers write results into slot i so the outcome
// does not depend on scheduling. The first exception thrown by any call is
// rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace dregsim
