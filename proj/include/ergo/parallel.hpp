#pragma once

#include <cstddef>
#include <functional>

namespace ergo {

/// Worker count used by parallel_for. Defaults to 1.
void set_thread_count(std::size_t n);
std::size_t thread_count();

/// Runs body(i) for i in [0, n). Iterations are distributed over the configured
/// workers; callers write results into per-index slots and reduce them in index
/// order, so outputs never depend on the worker count. Calls made from inside a
/// running parallel_for execute serially.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace ergo
