#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "vj/cascade.hpp"
#include "vj/image.hpp"

namespace vj {

struct DetectParams {
    double scale_factor = 1.2;   // pyramid shrink ratio, > 1
    int step = 1;                // window slide in pixels, integer >= 1
    int min_window = 24;         // smallest face size, >= cascade window
    int group_min_neighbors = 2; // clusters smaller than this are dropped (0 = no grouping)
    double group_overlap = 0.4;  // IoU needed to cluster two raw boxes, in (0,1]
};

/// A detected window in original-image coordinates. score is the number of
/// raw boxes merged into this detection (0 for ungrouped raw boxes).
struct Detection {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;
    int scale_level = 0;
    int score = 0;
};

struct DetectReport {
    std::vector<Detection> detections;
    double elapsed_s = 0.0;
    std::uint64_t integral_value = 0; // bottom-right of the level-0 integral image
    std::uint64_t windows_scanned = 0;
    std::uint64_t weak_evals = 0;
};

/// Slides the cascade window over one integral image: x outer from 0 to
/// width-window_w inclusive, y inner from 0 to height-window_h inclusive,
/// both in increments of step. Returns accepted origins in scan order.
std::vector<std::pair<int, int>> scan_scale(const Cascade& c, const IntegralPair& ip,
                                            int step, EvalCounters* counters = nullptr);

/// Full multi-scale detection: pyramid, per-level integrals, window scan,
/// mapping back to original coordinates, grouping. workers == 1 is the
/// sequential reference; workers > 1 splits each level's x-range into
/// contiguous blocks of near-equal column counts (static partitioning) and
/// merges per-worker results in block order, so the output is identical to
/// the sequential run.
DetectReport detect(const GrayImage& img, const Cascade& c, const DetectParams& p,
                    int workers = 1);

double iou(const Detection& a, const Detection& b);

/// Partitions raw boxes into equivalence classes under the transitive
/// closure of pairwise IoU >= overlap; classes smaller than min_neighbors
/// are dropped and each surviving class becomes its coordinate-wise mean box
/// with score = class size.
std::vector<Detection> group_detections(const std::vector<Detection>& raw,
                                        int min_neighbors, double overlap);

/// Diagnostic ratio (elapsed seconds * integral value) / faces.
/// Throws ArgError when n_faces == 0 (the metric is undefined).
double rit(double elapsed_s, std::uint64_t integral_value, std::uint64_t n_faces);

} // namespace vj
