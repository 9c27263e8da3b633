#pragma once

#include <cstddef>
#include <functional>

namespace blockade {

// Worker count from BLOCKADE_WORKERS, else the hardware concurrency (>= 1).
std::size_t default_worker_count();

// Runs fn(task) for task in [0, tasks) on up to `workers` threads. Tasks are
// handed out dynamically; callers write results into per-task slots so the
// outcome is independent of scheduling. The exception from the lowest failing
// task index is rethrown after all workers stop.
void parallel_for(std::size_t tasks, std::size_t workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace blockade
