#pragma once

#include <cstddef>
#include <functional>

namespace parkcrit {

/// Number of workers to use. `requested` = 0 means hardware concurrency.
/// PARKCRIT_THREADS, when set to a positive integer, caps the result.
unsigned worker_count(unsigned requested = 0);

/// Splits [0, count) into `workers` contiguous chunks and runs
/// body(worker, begin, end) for each on its own thread. Chunk w always covers
/// the same range for a given (count, workers), so per-worker results can be
/// merged in worker order deterministically. Rethrows the first exception.
void parallel_chunks(std::size_t count, unsigned workers,
                     const std::function<void(unsigned, std::size_t, std::size_t)>& body);

} // namespace parkcrit
