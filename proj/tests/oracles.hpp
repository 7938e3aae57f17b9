// Test-only reference implementations: deliberately naive, independent of the
// library's computation paths, used to derive expected values.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "vj/cascade.hpp"
#include "vj/detect.hpp"
#include "vj/image.hpp"
#include "vj/synth.hpp"
#include "vj/taskgraph.hpp"

namespace oracle {

// Per-cell double-loop integral images (O(w^2 h^2) overall).
inline void naive_integrals(const vj::GrayImage& img, std::vector<std::uint64_t>& ii,
                            std::vector<std::uint64_t>& sq) {
    ii.assign(img.data.size(), 0);
    sq.assign(img.data.size(), 0);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            std::uint64_t s = 0, s2 = 0;
            for (int yy = 0; yy <= y; ++yy) {
                for (int xx = 0; xx <= x; ++xx) {
                    const std::uint64_t v = img.at(xx, yy);
                    s += v;
                    s2 += v * v;
                }
            }
            ii[static_cast<std::size_t>(y) * img.width + x] = s;
            sq[static_cast<std::size_t>(y) * img.width + x] = s2;
        }
    }
}

inline std::uint64_t naive_rect_sum(const vj::GrayImage& img, const vj::Rect& r,
                                    bool squared = false) {
    std::uint64_t s = 0;
    for (int y = r.y; y < r.y + r.h; ++y) {
        for (int x = r.x; x < r.x + r.w; ++x) {
            const std::uint64_t v = img.at(x, y);
            s += squared ? v * v : v;
        }
    }
    return s;
}

// floor(sqrt(N*Sum(x^2) - Sum(x)^2)) from direct pixel statistics.
inline std::uint64_t naive_window_sigma_n(const vj::GrayImage& img, int x0, int y0, int w,
                                          int h) {
    std::uint64_t sum = 0, sum_sq = 0;
    for (int y = y0; y < y0 + h; ++y) {
        for (int x = x0; x < x0 + w; ++x) {
            const std::uint64_t v = img.at(x, y);
            sum += v;
            sum_sq += v * v;
        }
    }
    const std::uint64_t n = static_cast<std::uint64_t>(w) * h;
    const std::uint64_t lhs = n * sum_sq;
    const std::uint64_t rhs = sum * sum;
    if (lhs <= rhs) return 0;
    const auto target = lhs - rhs;
    std::uint64_t r = 0;
    while ((r + 1) * (r + 1) <= target) ++r;
    return r;
}

inline vj::GrayImage random_image(vj::Rng& rng, int w, int h, int max_val = 255) {
    vj::GrayImage img(w, h);
    for (auto& px : img.data)
        px = static_cast<std::uint8_t>(rng.below(static_cast<std::uint32_t>(max_val + 1)));
    return img;
}

// Weighted per-pixel feature evaluation, no integral images involved.
inline std::int64_t naive_eval_feature(const vj::HaarFeature& f, const vj::GrayImage& img,
                                       int ox, int oy) {
    std::int64_t sum = 0;
    for (int i = 0; i < f.rect_count; ++i) {
        const vj::WeightedRect& wr = f.rects[i];
        std::int64_t rect = 0;
        for (int y = 0; y < wr.rect.h; ++y)
            for (int x = 0; x < wr.rect.w; ++x)
                rect += img.at(ox + wr.rect.x + x, oy + wr.rect.y + y);
        sum += static_cast<std::int64_t>(wr.weight) * rect;
    }
    return sum;
}

inline vj::HaarFeature random_feature(vj::Rng& rng, int win = 24) {
    vj::HaarFeature f;
    f.rect_count = rng.below(2) == 0 ? 2 : 3;
    for (int i = 0; i < f.rect_count; ++i) {
        vj::WeightedRect wr;
        wr.rect.w = rng.range(1, win / 2);
        wr.rect.h = rng.range(1, win / 2);
        wr.rect.x = rng.range(0, win - wr.rect.w);
        wr.rect.y = rng.range(0, win - wr.rect.h);
        do {
            wr.weight = rng.range(-3, 3);
        } while (wr.weight == 0);
        f.rects[i] = wr;
    }
    return f;
}

inline vj::Cascade random_cascade(vj::Rng& rng, int n_stages, int max_weak_per_stage) {
    vj::Cascade c;
    for (int s = 0; s < n_stages; ++s) {
        vj::Stage stage;
        const int n_weak = rng.range(1, max_weak_per_stage);
        for (int w = 0; w < n_weak; ++w) {
            vj::WeakClassifier wc;
            wc.feature = random_feature(rng);
            wc.threshold = rng.range(-2000, 2000);
            wc.left_val = rng.range(-4096, 4096);
            wc.right_val = rng.range(-4096, 4096);
            stage.weak.push_back(wc);
        }
        stage.threshold = rng.range(-4096, 4096);
        c.stages.push_back(std::move(stage));
    }
    return c;
}

// Evaluates every stage regardless of failures, then applies the conjunction.
inline bool full_eval_cascade(const vj::Cascade& c, const vj::IntegralPair& ip, int ox,
                              int oy) {
    const std::uint64_t sigma_n = vj::window_stddev(ip, ox, oy, c.window_w, c.window_h);
    bool all = true;
    for (const vj::Stage& s : c.stages) {
        const vj::StageResult r = vj::eval_stage(s, ip, ox, oy, sigma_n);
        all = all && r.passed;
    }
    return all;
}

// Transitive closure of the pairwise-IoU relation by repeated squaring of the
// adjacency matrix (no union-find).
inline std::vector<int> closure_classes(const std::vector<vj::Detection>& boxes,
                                        double overlap) {
    const std::size_t n = boxes.size();
    std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
        adj[i][i] = 1;
        for (std::size_t j = i + 1; j < n; ++j)
            adj[i][j] = adj[j][i] = vj::iou(boxes[i], boxes[j]) >= overlap ? 1 : 0;
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (adj[i][k])
                for (std::size_t j = 0; j < n; ++j)
                    if (adj[k][j]) adj[i][j] = 1;
    std::vector<int> cls(n, -1);
    int next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (cls[i] != -1) continue;
        cls[i] = next;
        for (std::size_t j = 0; j < n; ++j)
            if (adj[i][j]) cls[j] = next;
        ++next;
    }
    return cls;
}

// ---- scheduling oracles -------------------------------------------------

// Random DAG whose deps always point backwards (layered shape).
inline vj::TaskGraph random_layered_dag(vj::Rng& rng, int n_tasks, int max_width = 4) {
    vj::TaskGraph g;
    std::vector<int> layer_of;
    int layer = 0, in_layer = 0, width = 1 + static_cast<int>(rng.below(
                                       static_cast<std::uint32_t>(max_width)));
    for (int i = 0; i < n_tasks; ++i) {
        if (in_layer >= width) {
            ++layer;
            in_layer = 0;
            width = 1 + static_cast<int>(rng.below(static_cast<std::uint32_t>(max_width)));
        }
        vj::TaskNode t;
        t.id = i;
        t.kind = vj::TaskKind::scan_block;
        t.work = 1000.0 * rng.range(1, 50);
        if (layer > 0) {
            for (int j = 0; j < i; ++j) {
                if (layer_of[static_cast<std::size_t>(j)] == layer - 1 && rng.below(100) < 55)
                    t.deps.push_back(j);
            }
            if (t.deps.empty()) t.deps.push_back(rng.range(0, i - 1));
        }
        layer_of.push_back(layer);
        g.nodes.push_back(std::move(t));
        ++in_layer;
    }
    return g;
}

// Longest-path bottom levels by exhaustive downstream path enumeration.
inline double path_enum_bl(const vj::TaskGraph& g, const std::vector<double>& exec, int node,
                           const std::vector<std::vector<int>>& succ) {
    double best = exec[static_cast<std::size_t>(node)];
    for (int s : succ[static_cast<std::size_t>(node)])
        best = std::max(best, exec[static_cast<std::size_t>(node)] + path_enum_bl(g, exec, s, succ));
    return best;
}

} // namespace oracle
