#include "vj/taskgraph.hpp"

#include <algorithm>
#include <sstream>

#include "vj/error.hpp"

namespace vj {

const char* task_kind_name(TaskKind k) {
    switch (k) {
        case TaskKind::downscale: return "downscale";
        case TaskKind::integral: return "integral";
        case TaskKind::scan_block: return "scan_block";
        case TaskKind::reduce: return "reduce";
    }
    return "?";
}

std::size_t TaskGraph::edge_count() const {
    std::size_t n = 0;
    for (const TaskNode& t : nodes) n += t.deps.size();
    return n;
}

std::vector<std::vector<int>> TaskGraph::successors() const {
    std::vector<std::vector<int>> succ(nodes.size());
    for (const TaskNode& t : nodes)
        for (int d : t.deps) succ[d].push_back(t.id);
    return succ;
}

void TaskGraph::validate() const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].id != static_cast<int>(i))
            throw GraphError("task ids must be dense and ordered");
        if (nodes[i].work <= 0.0)
            throw GraphError("task " + std::to_string(i) + " has non-positive work");
        for (int d : nodes[i].deps) {
            if (d < 0 || d >= static_cast<int>(nodes.size()))
                throw GraphError("task " + std::to_string(i) + " depends on unknown id " +
                                 std::to_string(d));
            if (d >= static_cast<int>(i))
                throw GraphError("task " + std::to_string(i) + " depends on " +
                                 std::to_string(d) + "; dependency cycle");
        }
    }
}

namespace {

// Work-unit coefficients, sized against a ~20-weak-evaluations-per-window
// scan cost so downscale and integral sit at a few percent of the total,
// matching the profile shape of the real detector.
constexpr double kDownscaleWorkPerPixel = 0.15;
constexpr double kIntegralWorkPerPixel = 0.4;
constexpr double kReduceWorkPerWindow = 1e-3;

} // namespace

TaskGraph build_detection_dag(int img_w, int img_h, const DetectParams& p, int block_cols,
                              double mean_weak_evals) {
    if (block_cols < 1) throw ArgError("build_detection_dag: block_cols must be >= 1");
    if (p.step < 1) throw ArgError("build_detection_dag: step must be >= 1");
    if (p.scale_factor <= 1.0) throw ArgError("build_detection_dag: scale_factor must be > 1");
    if (mean_weak_evals <= 0.0)
        throw ArgError("build_detection_dag: mean_weak_evals must be > 0");

    TaskGraph g;
    g.step = p.step;
    g.scale_factor = p.scale_factor;

    const int win = p.min_window;
    std::vector<int> scan_ids;
    double total_windows = 0.0;
    double scale = 1.0;
    for (int level = 0;; ++level, scale *= p.scale_factor) {
        const int w = static_cast<int>(img_w / scale);
        const int h = static_cast<int>(img_h / scale);
        if (w < win || h < win) break;

        const int downscale_id = static_cast<int>(g.nodes.size());
        TaskNode down;
        down.id = downscale_id;
        down.kind = TaskKind::downscale;
        // Level 0 reuses the input image; keep a token cost so the node exists.
        down.work = level == 0 ? 1.0 : kDownscaleWorkPerPixel * w * h;
        g.nodes.push_back(std::move(down));

        TaskNode integ;
        integ.id = downscale_id + 1;
        integ.kind = TaskKind::integral;
        integ.work = kIntegralWorkPerPixel * w * h;
        integ.deps = {downscale_id};
        g.nodes.push_back(std::move(integ));

        const int columns = (w - win) / p.step + 1;
        const int rows = (h - win) / p.step + 1;
        const int blocks = (columns + block_cols - 1) / block_cols;
        for (int b = 0; b < blocks; ++b) {
            const int cols_here = std::min(block_cols, columns - b * block_cols);
            TaskNode scan;
            scan.id = static_cast<int>(g.nodes.size());
            scan.kind = TaskKind::scan_block;
            scan.work = static_cast<double>(cols_here) * rows * mean_weak_evals;
            scan.deps = {downscale_id + 1};
            scan_ids.push_back(scan.id);
            g.nodes.push_back(std::move(scan));
        }
        total_windows += static_cast<double>(columns) * rows;
    }

    TaskNode reduce;
    reduce.id = static_cast<int>(g.nodes.size());
    reduce.kind = TaskKind::reduce;
    reduce.work = std::max(1.0, kReduceWorkPerWindow * total_windows);
    reduce.deps = scan_ids;
    g.nodes.push_back(std::move(reduce));

    g.validate();
    return g;
}

std::vector<double> bottom_levels(const TaskGraph& g, const PlatformModel& platform,
                                  int ref_mhz) {
    g.validate();
    const double speed = platform.speed(Cluster::big, ref_mhz);
    const auto succ = g.successors();
    std::vector<double> bl(g.nodes.size(), 0.0);
    for (int i = static_cast<int>(g.nodes.size()) - 1; i >= 0; --i) {
        double tail = 0.0;
        for (int s : succ[i]) tail = std::max(tail, bl[s]);
        bl[i] = g.nodes[i].work / speed + platform.dispatch_s + tail;
    }
    return bl;
}

std::string export_dot(const TaskGraph& g) {
    std::ostringstream out;
    out << "digraph detection {\n  rankdir=TB;\n";
    for (const TaskNode& t : g.nodes) {
        out << "  n" << t.id << " [label=\"" << t.id << " " << task_kind_name(t.kind) << "\\n"
            << t.work << " u\"];\n";
    }
    for (const TaskNode& t : g.nodes)
        for (int d : t.deps) out << "  n" << d << " -> n" << t.id << ";\n";
    out << "}\n";
    return out.str();
}

} // namespace vj
