#pragma once

#include <cstddef>
#include <functional>

namespace finsler {

/// Worker count used when a call passes jobs <= 0. Initially 1.
int default_jobs();
void set_default_jobs(int jobs);

/// Runs fn(i) for i in [0, count) on up to `jobs` threads. Calls made from
/// inside a worker run serially on that worker. If any call throws, the
/// exception of the lowest failing index is rethrown after all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn, int jobs = 0);

}  // namespace finsler
