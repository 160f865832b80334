#pragma once

#include <cstddef>
#include <functional>

namespace cirlab {

/// Worker count actually used: `requested`, or the hardware concurrency when
/// requested == 0 (at least 1 either way).
unsigned effective_threads(unsigned requested);

/// Runs fn(i) for every i in [0, count) on a static partition of the index
/// range. Callers write results into index-addressed slots, so the outcome
/// is independent of the worker count and of scheduling. Exceptions from
/// workers are rethrown on the calling thread.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace cirlab
