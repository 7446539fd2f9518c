#pragma once

#include <cstddef>
#include <functional>

namespace gengsp {

/// Worker count: hardware concurrency, capped by GENGSP_THREADS when set.
std::size_t thread_budget();

/// Runs body(i) for i in [0, count). Each index is handled exactly once;
/// callers write results into slot i so the merge order is fixed. The first
/// exception thrown by any body is rethrown after all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace gengsp
