#pragma once

#include <cstdint>
#include <functional>

namespace simplexmc {

/// Worker budget for coordinate-parallel loops. Results never depend on it:
/// every coordinate draws from its own stream and outputs are merged in a
/// fixed order, so any budget produces bit-identical results.
int max_threads();
void set_max_threads(int n);

/// Run fn(begin, end) over a static partition of [0, n).
void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& fn);

}
