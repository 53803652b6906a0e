#pragma once

#include <functional>

namespace camid {

// >= 1; hardware_concurrency with a fallback of 1
int default_thread_count();

// Static block partition of [begin, end) over `threads` workers.
// fn(i) must only write state owned by index i, so the result is
// independent of the thread count. threads <= 1 runs inline.
void parallel_for(long begin, long end, int threads, const std::function<void(long)>& fn);

}  // namespace camid
