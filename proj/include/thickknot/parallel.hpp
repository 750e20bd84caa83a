#pragma once

#include <cstddef>
#include <functional>

namespace thickknot {

/// Worker count for internal scans: THICKKNOT_THREADS if set (>= 1),
/// otherwise the hardware concurrency.
std::size_t thread_count();

/// Splits [0, n) into contiguous chunks, one per worker, and calls
/// fn(chunk, begin, end). Chunk boundaries depend only on n and the worker
/// count, so callers that merge per-chunk results in chunk order get the
/// same answer as a sequential scan.
void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn,
                     std::size_t chunks);

}  // namespace thickknot
