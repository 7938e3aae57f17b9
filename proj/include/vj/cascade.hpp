#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vj/image.hpp"

namespace vj {

// Fixed-point scale shared by weak thresholds, contributions and stage
// thresholds: stored values are real values times 2^12.
inline constexpr int kFixedShift = 12;
inline constexpr std::int64_t kFixedOne = std::int64_t{1} << kFixedShift;

/// Weighted rectangle of a Haar feature. Coordinates are relative to the
/// top-left of the detection window.
struct WeightedRect {
    Rect rect;
    int weight = 0;
};

/// Up to three weighted rectangles; two-rectangle features leave the third
/// slot unused. The serialized form always writes three slots (a null slot
/// is five zeros).
struct HaarFeature {
    std::array<WeightedRect, 3> rects{};
    int rect_count = 2;
};

/// Single-feature threshold test. Returns left_val when the raw feature sum
/// is below threshold*sigmaN (variance-normalized comparison), right_val
/// otherwise. Polarity is folded into the sign of threshold/weights.
struct WeakClassifier {
    HaarFeature feature;
    std::int32_t threshold = 0; // 2^12 fixed-point, in per-sigmaN units
    std::int32_t left_val = 0;  // 2^12 fixed-point contribution
    std::int32_t right_val = 0;
};

struct Stage {
    std::vector<WeakClassifier> weak;
    std::int32_t threshold = 0; // 2^12 fixed-point
};

struct Cascade {
    int window_w = 24;
    int window_h = 24;
    std::vector<Stage> stages;

    std::size_t total_weak() const;
};

/// Per-evaluation work tally. When running windows concurrently each worker
/// keeps its own counters and the totals are merged afterwards.
struct EvalCounters {
    std::uint64_t windows = 0;
    std::uint64_t stage_evals = 0;
    std::uint64_t weak_evals = 0;

    EvalCounters& operator+=(const EvalCounters& o) {
        windows += o.windows;
        stage_evals += o.stage_evals;
        weak_evals += o.weak_evals;
        return *this;
    }
};

/// Parses the VJC1 text format (see serialize_cascade). Throws ParseError
/// with a line number on malformed input.
Cascade parse_cascade(const std::string& text);
Cascade load_cascade(const std::string& path);

/// Text form, one stage header per stage and one 18-integer line per weak
/// classifier:
///   VJC1 <n_stages> <window_w> <window_h>
///   STAGE <n_weak> <stage_threshold>
///   x1 y1 w1 h1 wt1 x2 y2 w2 h2 wt2 x3 y3 w3 h3 wt3 threshold left right
/// parse_cascade(serialize_cascade(c)) is byte-identical to re-serialization.
std::string serialize_cascade(const Cascade& c);
void save_cascade(const Cascade& c, const std::string& path);

/// Structural warnings that are not errors (e.g. a stage with more weak
/// classifiers than its successor).
std::vector<std::string> lint_cascade(const Cascade& c);

/// Raw feature sum at window origin (ox, oy): sum of weight * rect_sum over
/// the feature's rectangles.
std::int64_t eval_feature(const HaarFeature& f, const IntegralPair& ip, int ox, int oy);

/// Contribution of one weak classifier. sigma_n is the window's sigma*N from
/// window_stddev (0 is legal and degenerates to a sign test on the feature).
std::int64_t eval_weak(const WeakClassifier& wc, const IntegralPair& ip, int ox, int oy,
                       std::uint64_t sigma_n);

struct StageResult {
    std::int64_t stage_sum = 0;
    bool passed = false;
};

StageResult eval_stage(const Stage& s, const IntegralPair& ip, int ox, int oy,
                       std::uint64_t sigma_n);

/// Evaluates the full cascade at (ox, oy) with early rejection: stages run in
/// order and the first failure stops evaluation. Returns true iff every stage
/// passes. sigma*N is computed once per window.
bool run_cascade(const Cascade& c, const IntegralPair& ip, int ox, int oy,
                 EvalCounters* counters = nullptr);

} // namespace vj
