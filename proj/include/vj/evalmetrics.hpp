#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vj/detect.hpp"

namespace vj {

/// Detection/ground-truth tallies for one image or a whole corpus.
/// tp + fn always equals total_faces.
struct EvalCounts {
    long long tp = 0;
    long long fp = 0;
    long long fn = 0;
    long long total_faces = 0;

    long long total_error() const { return fp + fn; }
    EvalCounts& operator+=(const EvalCounts& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        total_faces += o.total_faces;
        return *this;
    }
};

struct Box {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;
};

double box_iou(const Box& a, const Box& b);

/// Greedy one-to-one matching by descending IoU: pairs with IoU >= iou_min
/// become TPs, leftover detections FPs, leftover truths FNs. Exact for
/// one-face-per-image ground truth.
EvalCounts match_detections(const std::vector<Box>& dets, const std::vector<Box>& truth,
                            double iou_min);

struct PrecisionRecall {
    std::optional<double> precision; // empty when tp+fp == 0
    std::optional<double> recall;    // empty when tp+fn == 0
};

PrecisionRecall precision_recall(const EvalCounts& c);

/// Ground-truth manifest: one line per image,
///   path n_faces x y w h [x y w h ...]
struct ManifestEntry {
    std::string path;
    std::vector<Box> faces;
};

std::vector<ManifestEntry> load_manifest(const std::string& path);
std::string serialize_manifest(const std::vector<ManifestEntry>& entries);

} // namespace vj
