#pragma once

#include <cstddef>
#include <functional>

namespace tractdist {

/// Worker count used by batch operations. Defaults to the hardware count.
std::size_t thread_count() noexcept;
void set_thread_count(std::size_t n) noexcept;

/// Calls `body(i)` for every i in [0, n). Each index is visited exactly once;
/// callers write results into per-index slots so output does not depend on the
/// schedule. The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace tractdist
