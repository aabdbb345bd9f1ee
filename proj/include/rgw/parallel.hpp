#pragma once

#include <cstddef>
#include <functional>

namespace rgw {

/// Worker count used by data-parallel loops. Starts at the hardware concurrency,
/// or RGW_THREADS when that variable is set.
unsigned default_threads();
void set_default_threads(unsigned n);

/// Runs body(i) for i in [0, n) on up to default_threads() threads. Work is split into
/// contiguous blocks; the first exception is rethrown on the caller's thread. Calls made from
/// inside a worker run serially.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace rgw
