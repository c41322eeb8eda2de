#pragma once

#include <cstddef>
#include <functional>

namespace tdlg {

// Worker count: min(hardware_concurrency, TDLG_THREADS) with a floor of 1.
std::size_t worker_count();

// Runs fn(begin, end) over a static partition of [0, n). Partition boundaries
// depend only on n, never on the worker count, so any writes keyed by index
// land identically no matter how many threads execute.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace tdlg
