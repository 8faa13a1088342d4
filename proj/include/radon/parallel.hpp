#pragma once

#include <cstddef>
#include <functional>

namespace radon {

/// Worker count: RADON_CERT_THREADS if set (>= 1), else the hardware count.
int thread_count();

/// Runs body(i) for i in [0, n). Each index is handled by exactly one
/// worker; callers write results into per-index slots so the outcome does
/// not depend on the schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace radon
