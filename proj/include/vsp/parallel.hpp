#pragma once

#include <cstddef>
#include <functional>

namespace vsp {

// Worker threads used by library kernels: VSP_THREADS if set and positive,
// otherwise the hardware concurrency (at least 1).
int default_thread_count();

// Runs body(chunk) for chunk in [0, chunks) on up to `threads` threads.
// Chunks are independent; callers that reduce across chunks must do so in
// chunk order to stay deterministic.
void parallel_chunks(std::size_t chunks, int threads, const std::function<void(std::size_t)>& body);

}  // namespace vsp
