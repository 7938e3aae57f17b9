#include "vj/detect.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <thread>

#include "vj/error.hpp"

namespace vj {

std::vector<std::pair<int, int>> scan_scale(const Cascade& c, const IntegralPair& ip,
                                            int step, EvalCounters* counters) {
    if (step < 1) throw ArgError("scan_scale: step must be >= 1");
    std::vector<std::pair<int, int>> hits;
    const int x_max = ip.width - c.window_w;
    const int y_max = ip.height - c.window_h;
    if (x_max < 0 || y_max < 0) return hits;
    for (int x = 0; x <= x_max; x += step) {
        for (int y = 0; y <= y_max; y += step) {
            if (run_cascade(c, ip, x, y, counters)) hits.emplace_back(x, y);
        }
    }
    return hits;
}

namespace {

// Scans columns [col_begin, col_end) of one pyramid level. Column k is
// x = k*step; the y loop is the inner loop, as in the sequential scan.
void scan_columns(const Cascade& c, const IntegralPair& ip, int step, int col_begin,
                  int col_end, int y_max, std::vector<std::pair<int, int>>& hits,
                  EvalCounters& counters) {
    for (int col = col_begin; col < col_end; ++col) {
        const int x = col * step;
        for (int y = 0; y <= y_max; y += step) {
            if (run_cascade(c, ip, x, y, &counters)) hits.emplace_back(x, y);
        }
    }
}

int round_to_int(double v) { return static_cast<int>(std::lround(v)); }

} // namespace

DetectReport detect(const GrayImage& img, const Cascade& c, const DetectParams& p,
                    int workers) {
    if (workers < 1) throw ArgError("detect: workers must be >= 1");
    if (p.step < 1) throw ArgError("detect: step must be >= 1");
    if (p.scale_factor <= 1.0) throw ArgError("detect: scale_factor must be > 1");

    const auto t0 = std::chrono::steady_clock::now();
    DetectReport report;

    const int min_dim_w = std::max(p.min_window, c.window_w);
    const int min_dim_h = std::max(p.min_window, c.window_h);
    const auto pyramid = build_pyramid(img, p.scale_factor, min_dim_w, min_dim_h);

    std::vector<Detection> raw;
    EvalCounters totals;
    for (std::size_t level = 0; level < pyramid.size(); ++level) {
        const IntegralPair ip = compute_integrals(pyramid[level].image);
        if (level == 0) report.integral_value = ip.integral_value();

        const int x_max = ip.width - c.window_w;
        const int y_max = ip.height - c.window_h;
        if (x_max < 0 || y_max < 0) continue;
        const int columns = x_max / p.step + 1;

        const int n = std::min(workers, columns);
        std::vector<std::vector<std::pair<int, int>>> hits(n);
        std::vector<EvalCounters> counters(n);
        if (n == 1) {
            scan_columns(c, ip, p.step, 0, columns, y_max, hits[0], counters[0]);
        } else {
            // Contiguous near-equal column blocks, one per worker; results are
            // concatenated in block order so the output matches a sequential
            // scan element for element.
            std::vector<std::thread> pool;
            pool.reserve(n);
            for (int wk = 0; wk < n; ++wk) {
                const int begin = static_cast<int>(static_cast<std::int64_t>(columns) * wk / n);
                const int end = static_cast<int>(static_cast<std::int64_t>(columns) * (wk + 1) / n);
                pool.emplace_back(scan_columns, std::cref(c), std::cref(ip), p.step, begin, end,
                                  y_max, std::ref(hits[wk]), std::ref(counters[wk]));
            }
            for (auto& t : pool) t.join();
        }

        const double scale = pyramid[level].scale;
        const int box = round_to_int(c.window_w * scale);
        for (int wk = 0; wk < n; ++wk) {
            totals += counters[wk];
            for (const auto& [x, y] : hits[wk]) {
                Detection d;
                d.w = std::min(box, img.width);
                d.h = std::min(box, img.height);
                d.x = std::clamp(round_to_int(x * scale), 0, img.width - d.w);
                d.y = std::clamp(round_to_int(y * scale), 0, img.height - d.h);
                d.scale_level = static_cast<int>(level);
                d.score = 0;
                raw.push_back(d);
            }
        }
    }

    report.windows_scanned = totals.windows;
    report.weak_evals = totals.weak_evals;
    report.detections = (p.group_min_neighbors > 0)
                            ? group_detections(raw, p.group_min_neighbors, p.group_overlap)
                            : raw;
    report.elapsed_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

double iou(const Detection& a, const Detection& b) {
    const int ix0 = std::max(a.x, b.x);
    const int iy0 = std::max(a.y, b.y);
    const int ix1 = std::min(a.x + a.w, b.x + b.w);
    const int iy1 = std::min(a.y + a.h, b.y + b.h);
    const std::int64_t iw = ix1 - ix0;
    const std::int64_t ih = iy1 - iy0;
    if (iw <= 0 || ih <= 0) return 0.0;
    const double inter = static_cast<double>(iw * ih);
    const double uni = static_cast<double>(a.w) * a.h + static_cast<double>(b.w) * b.h - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

std::vector<Detection> group_detections(const std::vector<Detection>& raw,
                                        int min_neighbors, double overlap) {
    if (overlap <= 0.0 || overlap > 1.0)
        throw ArgError("group_detections: overlap must be in (0, 1]");
    const std::size_t n = raw.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    };

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (iou(raw[i], raw[j]) >= overlap) {
                const std::size_t ri = find(i), rj = find(j);
                if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
            }
        }
    }

    // Classes keyed by root in first-seen order to keep output deterministic.
    std::vector<std::size_t> roots;
    std::vector<std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        auto it = std::find(roots.begin(), roots.end(), r);
        if (it == roots.end()) {
            roots.push_back(r);
            members.push_back({i});
        } else {
            members[static_cast<std::size_t>(it - roots.begin())].push_back(i);
        }
    }

    std::vector<Detection> merged;
    for (const auto& cls : members) {
        if (static_cast<int>(cls.size()) < min_neighbors) continue;
        double sx = 0, sy = 0, sw = 0, sh = 0;
        for (std::size_t i : cls) {
            sx += raw[i].x;
            sy += raw[i].y;
            sw += raw[i].w;
            sh += raw[i].h;
        }
        const double k = static_cast<double>(cls.size());
        Detection d;
        d.x = round_to_int(sx / k);
        d.y = round_to_int(sy / k);
        d.w = round_to_int(sw / k);
        d.h = round_to_int(sh / k);
        d.scale_level = raw[cls.front()].scale_level;
        d.score = static_cast<int>(cls.size());
        merged.push_back(d);
    }
    return merged;
}

double rit(double elapsed_s, std::uint64_t integral_value, std::uint64_t n_faces) {
    if (n_faces == 0)
        throw ArgError("rit: undefined for zero faces (the metric divides by face count)");
    return elapsed_s * static_cast<double>(integral_value) / static_cast<double>(n_faces);
}

} // namespace vj
