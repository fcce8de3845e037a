#pragma once

#include <cstddef>
#include <functional>

namespace arelab {

// 0 means: ARE_LAB_THREADS if set, else std::thread::hardware_concurrency().
std::size_t resolve_threads(std::size_t requested);

// Calls body(begin, end) over [0, count) in chunks of `grain`. Chunk
// boundaries depend only on count and grain, never on the thread count.
// The first exception thrown by a body is rethrown on the caller's thread.
void parallel_for(std::size_t count, std::size_t grain, std::size_t threads,
                  const std::function<void(std::size_t begin, std::size_t end)>& body);

}  // namespace arelab
