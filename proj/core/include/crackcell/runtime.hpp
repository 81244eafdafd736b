#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace crackcell {

// Global worker-thread count. 0 or negative selects hardware concurrency.
// Initialized once from the CRACKCELL_THREADS environment variable.
int num_threads();
void set_num_threads(int n);

// Splits [0, n) into fixed-size chunks (64 items) and processes them on
// num_threads() workers. Chunking is independent of the thread count, so any
// reduction that combines per-chunk results in chunk order is deterministic.
inline constexpr std::int64_t kParallelChunk = 64;
void parallel_for(std::int64_t n,
                  const std::function<void(std::int64_t, std::int64_t)>& chunk_fn);

// FNV-1a, used for config provenance hashes.
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace crackcell
