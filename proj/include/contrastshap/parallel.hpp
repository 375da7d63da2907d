#pragma once

#include <cstddef>
#include <functional>

namespace contrastshap {

// Runs body(i) for i in [0, count) on up to `threads` workers (0 or 1 runs inline).
// Each index is visited exactly once; callers write results by index, so output never
// depends on scheduling. The exception from the lowest failing index is rethrown.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace contrastshap
