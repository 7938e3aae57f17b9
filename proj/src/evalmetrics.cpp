#include "vj/evalmetrics.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "vj/error.hpp"

namespace vj {

double box_iou(const Box& a, const Box& b) {
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

EvalCounts match_detections(const std::vector<Box>& dets, const std::vector<Box>& truth,
                            double iou_min) {
    if (iou_min <= 0.0 || iou_min > 1.0)
        throw ArgError("match_detections: iou_min must be in (0, 1]");

    struct Pair {
        double iou;
        std::size_t det;
        std::size_t tru;
    };
    std::vector<Pair> pairs;
    for (std::size_t d = 0; d < dets.size(); ++d) {
        for (std::size_t t = 0; t < truth.size(); ++t) {
            const double v = box_iou(dets[d], truth[t]);
            if (v >= iou_min) pairs.push_back({v, d, t});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.iou != b.iou) return a.iou > b.iou;
        if (a.det != b.det) return a.det < b.det;
        return a.tru < b.tru;
    });

    std::vector<char> det_used(dets.size(), 0), tru_used(truth.size(), 0);
    long long tp = 0;
    for (const Pair& p : pairs) {
        if (det_used[p.det] || tru_used[p.tru]) continue;
        det_used[p.det] = tru_used[p.tru] = 1;
        ++tp;
    }

    EvalCounts c;
    c.tp = tp;
    c.fp = static_cast<long long>(dets.size()) - tp;
    c.fn = static_cast<long long>(truth.size()) - tp;
    c.total_faces = static_cast<long long>(truth.size());
    return c;
}

PrecisionRecall precision_recall(const EvalCounts& c) {
    PrecisionRecall pr;
    if (c.tp + c.fp > 0)
        pr.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    if (c.tp + c.fn > 0)
        pr.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    return pr;
}

std::vector<ManifestEntry> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::vector<ManifestEntry> entries;
    std::string raw;
    long line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::istringstream ss(raw);
        ManifestEntry e;
        if (!(ss >> e.path)) continue; // blank line
        if (e.path[0] == '#') continue;
        long long n = 0;
        if (!(ss >> n) || n < 0) throw ParseError("bad face count", line);
        for (long long i = 0; i < n; ++i) {
            Box b;
            if (!(ss >> b.x >> b.y >> b.w >> b.h))
                throw ParseError("expected " + std::to_string(4 * n) + " box coordinates", line);
            e.faces.push_back(b);
        }
        std::string extra;
        if (ss >> extra) throw ParseError("trailing tokens after boxes", line);
        entries.push_back(std::move(e));
    }
    return entries;
}

std::string serialize_manifest(const std::vector<ManifestEntry>& entries) {
    std::ostringstream out;
    for (const ManifestEntry& e : entries) {
        out << e.path << " " << e.faces.size();
        for (const Box& b : e.faces) out << " " << b.x << " " << b.y << " " << b.w << " " << b.h;
        out << "\n";
    }
    return out.str();
}

} // namespace vj
