#pragma once

#include <cstddef>
#include <functional>

namespace lsl {

/// Worker cap used by all parallel loops. Defaults to LSL_THREADS when set,
/// else 1.
int thread_count();
void set_thread_count(int n);

/// Runs fn(begin, end, chunk) over `chunks` contiguous slices of [0, n).
/// Chunk boundaries depend only on n and `chunks`, so per-chunk results merged
/// in chunk order are independent of the worker count.
void parallel_chunks(std::size_t n, std::size_t chunks,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

}  // namespace lsl
