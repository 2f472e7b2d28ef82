#pragma once

#include <cstddef>
#include <vector>

namespace cascade::quadrature {

/// Weights (in units of the node spacing) of a composite rule over
/// `intervals` equal intervals, `intervals + 1` entries.
///
///   0      -> {}          (empty range)
///   1      -> trapezoid
///   2..7   -> composite Simpson, 3/8 rule on the last three intervals when odd
///   >= 8   -> alternative extended Simpson, O(h^4):
///             17/48 59/48 43/48 49/48 1 ... 1 49/48 43/48 59/48 17/48
std::vector<double> composite_weights(std::size_t intervals);

/// Accumulates composite weights for [begin, end] into `w` (indexed by node).
void add_segment_weights(std::vector<double>& w, std::size_t begin, std::size_t end);

}  // namespace cascade::quadrature
