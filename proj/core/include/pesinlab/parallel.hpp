#pragma once

#include <cstddef>
#include <functional>

namespace pesinlab {

/// Run body(i) for i in [0, count) on up to `workers` threads. Indices are claimed
/// dynamically; callers write results into per-index slots so the outcome does not
/// depend on scheduling. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body);

/// Worker count from an explicit value, else PESINLAB_WORKERS, else 1.
unsigned resolve_workers(unsigned requested);

}  // namespace pesinlab
