#ifndef CRISP_PARALLEL_HPP
#define CRISP_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace crisp {

// Resolves a thread-count request: values > 0 are taken as-is, 0 means
// "use CRISP_THREADS if set, else hardware concurrency". Negative throws.
int resolve_threads(int requested);

// Runs fn(i) for i in [0, n) on up to `threads` workers. Work is split
// into contiguous static chunks, so results written to per-index slots are
// identical for any thread count. Exceptions from fn are rethrown.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace crisp

#endif
