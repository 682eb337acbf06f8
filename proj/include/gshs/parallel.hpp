#pragma once

#include <cstddef>
#include <functional>

namespace gshs {

// Worker count: explicit request if nonzero, else GSHS_WORKERS, else
// hardware concurrency. An explicit request is still overridden by
// GSHS_WORKERS when override_env is true (the CLI uses this).
std::size_t resolve_workers(std::size_t requested, bool override_env = false);

// Runs fn(begin, end) over contiguous blocks of [0, n). Exceptions are
// rethrown after all workers join; the one from the lowest block wins, so
// error reporting does not depend on the worker count as long as fn stops
// at its first failing item.
void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace gshs
