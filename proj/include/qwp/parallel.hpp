#pragma once

#include <cstddef>
#include <functional>

namespace qwp {

/// Worker count: QWP_THREADS if set to a positive integer, otherwise the
/// available hardware parallelism.
unsigned thread_count();

/// Runs body(i) for i in [0, n) on up to thread_count() threads.  Indices are
/// handed out in contiguous blocks; callers write results into per-index
/// slots so reductions stay in index order.  The first exception thrown by
/// any body is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace qwp
