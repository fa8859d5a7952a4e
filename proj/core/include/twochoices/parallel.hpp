#pragma once

#include <cstddef>
#include <functional>

namespace twochoices {

// Runs body(i) for i in [0, count) on up to `threads` workers (0 = hardware
// concurrency). Exceptions from any worker are rethrown on the caller after
// all workers join; the first one (lowest index) wins.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  unsigned threads = 0);

}  // namespace twochoices
