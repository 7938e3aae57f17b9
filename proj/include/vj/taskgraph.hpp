#pragma once

#include <string>
#include <vector>

#include "vj/detect.hpp"
#include "vj/platform.hpp"

namespace vj {

enum class TaskKind { downscale, integral, scan_block, reduce };

const char* task_kind_name(TaskKind k);

/// One node of the detection task graph. Dependencies always point to lower
/// ids, so node order is a topological order.
struct TaskNode {
    int id = 0;
    TaskKind kind = TaskKind::scan_block;
    double work = 0.0; // abstract work units, > 0
    std::vector<int> deps;
};

struct TaskGraph {
    std::vector<TaskNode> nodes;
    // Generation metadata carried into sweep records (0 when not applicable).
    int step = 0;
    double scale_factor = 0.0;

    std::size_t edge_count() const;
    std::vector<std::vector<int>> successors() const;
    /// Throws GraphError on dangling ids or deps that do not point backwards.
    void validate() const;
};

/// Task graph of one multi-scale detection pass over an img_w x img_h image:
/// per pyramid level a downscale node (no-op for level 0), an integral node
/// depending on it, and ceil(columns/block_cols) scan nodes depending on the
/// integral; a single reduce node joins every scan node. Work units:
/// downscale and integral are proportional to the level's pixels, a scan
/// block to its window count times mean_weak_evals, the reduce to a small
/// fraction of total windows.
TaskGraph build_detection_dag(int img_w, int img_h, const DetectParams& p,
                              int block_cols, double mean_weak_evals = 20.0);

/// Longest downstream path cost per task: bl(t) = exec(t) + max over
/// successors bl(s), with exec measured on a big core at ref_mhz (dispatch
/// overhead included). Throws GraphError on cycles.
std::vector<double> bottom_levels(const TaskGraph& g, const PlatformModel& platform,
                                  int ref_mhz);

/// Graphviz DOT rendering for inspection.
std::string export_dot(const TaskGraph& g);

} // namespace vj
