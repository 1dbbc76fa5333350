#pragma once

#include <cstddef>
#include <functional>

namespace gifs {

/// Caps worker parallelism for every batched routine in the library.
/// Zero selects the number of hardware threads.
void set_thread_count(unsigned count);
unsigned thread_count();

/// Runs `body(begin, end)` over consecutive chunks of [0, n). Chunk
/// boundaries depend only on `n` and `chunk`, never on the worker count, so
/// callers that write results per index get identical output for any
/// thread setting. The first exception thrown by a chunk is rethrown.
void parallel_for_chunks(std::size_t n, std::size_t chunk,
                         const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace gifs
