#pragma once

#include <vector>

#include "vj/cascade.hpp"

namespace vj {

/// Generates the five Viola-Jones feature templates at every position and
/// base size on a (stride, size_step) grid inside a window:
///   - two-rectangle edge, horizontal and vertical pair
///   - three-rectangle line, horizontal and vertical (encoded as whole-span
///     rect plus triple-weighted middle)
///   - four-rectangle checkerboard (whole block plus double-weighted diagonal)
/// stride=1, size_step=1 is the exhaustive set (162336 features at 24x24);
/// coarser grids give small subsets for desk-scale training. Every emitted
/// feature is zero-mean (sum of weight*area == 0) and fits the window.
std::vector<HaarFeature> enumerate_features(int window_w, int window_h,
                                            int stride = 1, int size_step = 1);

} // namespace vj
