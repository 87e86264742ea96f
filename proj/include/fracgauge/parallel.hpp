#pragma once

#include <cstddef>
#include <functional>

namespace fracgauge {

/// Worker count used by assembly and other block-parallel loops. Defaults to
/// 1. Values below 1 are clamped to 1.
void set_thread_count(int n);
int thread_count();

/// Split [0, n) into contiguous blocks and run body(begin, end) on each,
/// using thread_count() workers. Blocks are fixed by n and block size, so any
/// body that writes only to its own indices gives thread-count independent
/// results.
void parallel_for(std::size_t n, std::size_t block, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace fracgauge
