#pragma once

#include <cstddef>
#include <functional>

namespace netmf {

// Process-wide cap on worker threads used by internal parallel loops.
// 0 means "use std::thread::hardware_concurrency()". Results of every
// operation in this library are independent of this setting.
void set_thread_count(unsigned threads) noexcept;
unsigned thread_count() noexcept;

// Splits [0, n) into contiguous chunks and runs body(begin, end) on up to
// thread_count() workers. Chunk boundaries depend only on n and the worker
// count; callers must make per-index work independent of the partition.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace netmf
