#include "vjamp.h"

#include <cstring>
#include <string>

#include "vj/cascade.hpp"
#include "vj/detect.hpp"
#include "vj/error.hpp"
#include "vj/evalmetrics.hpp"
#include "vj/features.hpp"
#include "vj/image.hpp"
#include "vj/platform.hpp"
#include "vj/pnm.hpp"
#include "vj/report.hpp"
#include "vj/sim.hpp"
#include "vj/synth.hpp"
#include "vj/taskgraph.hpp"
#include "vj/train.hpp"

namespace {

thread_local std::string g_last_error;

vj_status status_of(const std::exception& e) {
    if (dynamic_cast<const vj::ParseError*>(&e)) return VJ_ERR_PARSE;
    if (dynamic_cast<const vj::IoError*>(&e)) return VJ_ERR_IO;
    if (dynamic_cast<const vj::BoundsError*>(&e)) return VJ_ERR_BOUNDS;
    if (dynamic_cast<const vj::ArgError*>(&e)) return VJ_ERR_ARG;
    if (dynamic_cast<const vj::TrainError*>(&e)) return VJ_ERR_TRAIN;
    if (dynamic_cast<const vj::GraphError*>(&e)) return VJ_ERR_GRAPH;
    return VJ_ERR_INTERNAL;
}

template <typename Fn>
vj_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return VJ_OK;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return status_of(e);
    } catch (...) {
        g_last_error = "unknown error";
        return VJ_ERR_INTERNAL;
    }
}

vj_status fail_arg(const char* msg) {
    g_last_error = msg;
    return VJ_ERR_ARG;
}

vj::Cluster parse_cluster_name(const char* s) {
    const std::string name = s ? s : "";
    if (name == "big") return vj::Cluster::big;
    if (name == "little") return vj::Cluster::little;
    throw vj::ArgError("unknown cluster '" + name + "'");
}

} // namespace

struct vj_image {
    vj::GrayImage img;
};
struct vj_cascade {
    vj::Cascade c;
    std::string lint_buffer;
};
struct vj_detections {
    vj::DetectReport report;
};
struct vj_manifest {
    std::vector<vj::ManifestEntry> entries;
};
struct vj_platform {
    vj::PlatformModel p;
};
struct vj_taskgraph {
    vj::TaskGraph g;
};
struct vj_schedule {
    vj::ScheduleResult s;
    vj::EnergyReport e;
    vj::PlatformModel platform; // snapshot for CSV core names
};

extern "C" {

const char* vj_last_error(void) { return g_last_error.c_str(); }

const char* vj_version(void) { return "0.3.0"; }

/* ---- images ---------------------------------------------------------- */

vj_status vj_image_load(const char* path, vj_image** out) {
    if (!path || !out) return fail_arg("null argument");
    return guarded([&] { *out = new vj_image{vj::load_pnm(path)}; });
}

vj_status vj_image_create(int width, int height, const uint8_t* data, vj_image** out) {
    if (!data || !out) return fail_arg("null argument");
    return guarded([&] {
        vj::GrayImage img(width, height);
        if (!img.valid()) throw vj::ArgError("bad image dimensions");
        std::memcpy(img.data.data(), data, img.data.size());
        *out = new vj_image{std::move(img)};
    });
}

int vj_image_width(const vj_image* img) { return img ? img->img.width : 0; }
int vj_image_height(const vj_image* img) { return img ? img->img.height : 0; }
const uint8_t* vj_image_data(const vj_image* img) { return img ? img->img.data.data() : nullptr; }

vj_status vj_image_save_pgm(const vj_image* img, const char* path) {
    if (!img || !path) return fail_arg("null argument");
    return guarded([&] { vj::save_pgm(img->img, path); });
}

void vj_image_free(vj_image* img) { delete img; }

/* ---- cascades -------------------------------------------------------- */

vj_status vj_cascade_load(const char* path, vj_cascade** out) {
    if (!path || !out) return fail_arg("null argument");
    return guarded([&] { *out = new vj_cascade{vj::load_cascade(path), {}}; });
}

vj_status vj_cascade_parse(const char* text, vj_cascade** out) {
    if (!text || !out) return fail_arg("null argument");
    return guarded([&] { *out = new vj_cascade{vj::parse_cascade(text), {}}; });
}

vj_status vj_cascade_save(const vj_cascade* c, const char* path) {
    if (!c || !path) return fail_arg("null argument");
    return guarded([&] { vj::save_cascade(c->c, path); });
}

int vj_cascade_stages(const vj_cascade* c) {
    return c ? static_cast<int>(c->c.stages.size()) : 0;
}
long long vj_cascade_weak_total(const vj_cascade* c) {
    return c ? static_cast<long long>(c->c.total_weak()) : 0;
}
int vj_cascade_window_w(const vj_cascade* c) { return c ? c->c.window_w : 0; }
int vj_cascade_window_h(const vj_cascade* c) { return c ? c->c.window_h : 0; }

const char* vj_cascade_lint(vj_cascade* c) {
    if (!c) return "";
    c->lint_buffer.clear();
    for (const std::string& w : vj::lint_cascade(c->c)) {
        c->lint_buffer += w;
        c->lint_buffer += '\n';
    }
    return c->lint_buffer.c_str();
}

void vj_cascade_free(vj_cascade* c) { delete c; }

/* ---- detection ------------------------------------------------------- */

void vj_detect_params_init(vj_detect_params* p) {
    if (!p) return;
    const vj::DetectParams d;
    p->scale_factor = d.scale_factor;
    p->step = d.step;
    p->min_window = d.min_window;
    p->group_min_neighbors = d.group_min_neighbors;
    p->group_overlap = d.group_overlap;
}

namespace {

vj::DetectParams to_params(const vj_detect_params* p) {
    vj::DetectParams d;
    if (p) {
        d.scale_factor = p->scale_factor;
        d.step = p->step;
        d.min_window = p->min_window;
        d.group_min_neighbors = p->group_min_neighbors;
        d.group_overlap = p->group_overlap;
    }
    return d;
}

} // namespace

vj_status vj_detect(const vj_image* img, const vj_cascade* c, const vj_detect_params* p,
                    int workers, vj_detections** out) {
    if (!img || !c || !out) return fail_arg("null argument");
    return guarded([&] {
        *out = new vj_detections{vj::detect(img->img, c->c, to_params(p), workers)};
    });
}

int vj_detections_count(const vj_detections* d) {
    return d ? static_cast<int>(d->report.detections.size()) : 0;
}

void vj_detections_get(const vj_detections* d, int index, int* x, int* y, int* w, int* h,
                       int* score) {
    if (!d || index < 0 || index >= static_cast<int>(d->report.detections.size())) return;
    const vj::Detection& det = d->report.detections[static_cast<std::size_t>(index)];
    if (x) *x = det.x;
    if (y) *y = det.y;
    if (w) *w = det.w;
    if (h) *h = det.h;
    if (score) *score = det.score;
}

double vj_detections_elapsed_s(const vj_detections* d) { return d ? d->report.elapsed_s : 0.0; }
unsigned long long vj_detections_integral_value(const vj_detections* d) {
    return d ? d->report.integral_value : 0;
}
unsigned long long vj_detections_windows_scanned(const vj_detections* d) {
    return d ? d->report.windows_scanned : 0;
}
unsigned long long vj_detections_weak_evals(const vj_detections* d) {
    return d ? d->report.weak_evals : 0;
}

void vj_detections_free(vj_detections* d) { delete d; }

vj_status vj_image_annotate_ppm(const vj_image* img, const vj_detections* d,
                                const char* path) {
    if (!img || !d || !path) return fail_arg("null argument");
    return guarded([&] {
        std::vector<vj::Rect> boxes;
        for (const vj::Detection& det : d->report.detections)
            boxes.push_back(vj::Rect{det.x, det.y, det.w, det.h});
        vj::save_ppm_annotated(img->img, boxes, path);
    });
}

vj_status vj_rit(double elapsed_s, unsigned long long integral_value, long long n_faces,
                 double* out) {
    if (!out) return fail_arg("null argument");
    return guarded([&] {
        if (n_faces < 0) throw vj::ArgError("rit: negative face count");
        *out = vj::rit(elapsed_s, integral_value, static_cast<std::uint64_t>(n_faces));
    });
}

/* ---- evaluation ------------------------------------------------------ */

namespace {

std::vector<vj::Box> to_boxes(const int* xywh, int n) {
    std::vector<vj::Box> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out.push_back(vj::Box{xywh[4 * i], xywh[4 * i + 1], xywh[4 * i + 2], xywh[4 * i + 3]});
    return out;
}

} // namespace

vj_status vj_match_detections(const int* det_xywh, int n_det, const int* truth_xywh,
                              int n_truth, double iou_min, long long* tp, long long* fp,
                              long long* fn) {
    if ((n_det > 0 && !det_xywh) || (n_truth > 0 && !truth_xywh)) return fail_arg("null boxes");
    return guarded([&] {
        const vj::EvalCounts c =
            vj::match_detections(to_boxes(det_xywh, n_det), to_boxes(truth_xywh, n_truth),
                                 iou_min);
        if (tp) *tp = c.tp;
        if (fp) *fp = c.fp;
        if (fn) *fn = c.fn;
    });
}

vj_status vj_precision_recall(long long tp, long long fp, long long fn, double* precision,
                              int* has_precision, double* recall, int* has_recall) {
    return guarded([&] {
        if (tp < 0 || fp < 0 || fn < 0) throw vj::ArgError("negative counts");
        vj::EvalCounts c;
        c.tp = tp;
        c.fp = fp;
        c.fn = fn;
        c.total_faces = tp + fn;
        const vj::PrecisionRecall pr = vj::precision_recall(c);
        if (precision) *precision = pr.precision.value_or(0.0);
        if (has_precision) *has_precision = pr.precision.has_value() ? 1 : 0;
        if (recall) *recall = pr.recall.value_or(0.0);
        if (has_recall) *has_recall = pr.recall.has_value() ? 1 : 0;
    });
}

vj_status vj_manifest_load(const char* path, vj_manifest** out) {
    if (!path || !out) return fail_arg("null argument");
    return guarded([&] { *out = new vj_manifest{vj::load_manifest(path)}; });
}

int vj_manifest_count(const vj_manifest* m) {
    return m ? static_cast<int>(m->entries.size()) : 0;
}

const char* vj_manifest_path(const vj_manifest* m, int index) {
    if (!m || index < 0 || index >= static_cast<int>(m->entries.size())) return "";
    return m->entries[static_cast<std::size_t>(index)].path.c_str();
}

int vj_manifest_face_count(const vj_manifest* m, int index) {
    if (!m || index < 0 || index >= static_cast<int>(m->entries.size())) return 0;
    return static_cast<int>(m->entries[static_cast<std::size_t>(index)].faces.size());
}

int vj_manifest_faces(const vj_manifest* m, int index, int* xywh, int cap) {
    if (!m || index < 0 || index >= static_cast<int>(m->entries.size())) return 0;
    const auto& faces = m->entries[static_cast<std::size_t>(index)].faces;
    const int n = static_cast<int>(faces.size());
    for (int i = 0; i < n && i < cap; ++i) {
        xywh[4 * i] = faces[static_cast<std::size_t>(i)].x;
        xywh[4 * i + 1] = faces[static_cast<std::size_t>(i)].y;
        xywh[4 * i + 2] = faces[static_cast<std::size_t>(i)].w;
        xywh[4 * i + 3] = faces[static_cast<std::size_t>(i)].h;
    }
    return n;
}

void vj_manifest_free(vj_manifest* m) { delete m; }

/* ---- training -------------------------------------------------------- */

void vj_train_params_init(vj_train_params* p) {
    if (!p) return;
    p->max_stages = 5;
    p->d_min = 0.99;
    p->f_max = 0.5;
    p->max_weak_per_stage = 64;
    p->feature_stride = 2;
    p->feature_size_step = 2;
}

vj_status vj_train(const char* pos_dir, const char* neg_dir, const vj_train_params* p,
                   vj_cascade** out) {
    if (!pos_dir || !neg_dir || !p || !out) return fail_arg("null argument");
    return guarded([&] {
        const auto pos = vj::load_sample_dir(pos_dir, 1);
        const auto neg = vj::load_sample_dir(neg_dir, 0);
        const auto features = vj::enumerate_features(24, 24, p->feature_stride,
                                                     p->feature_size_step);
        vj::StageTargets targets;
        targets.max_stages = p->max_stages;
        targets.d_min = p->d_min;
        targets.f_max = p->f_max;
        targets.max_weak_per_stage = p->max_weak_per_stage;
        vj::TrainedCascade trained = vj::train_cascade(pos, neg, targets, features);
        *out = new vj_cascade{std::move(trained.cascade), {}};
    });
}

vj_status vj_cascade_rates_dirs(const vj_cascade* c, const char* pos_dir, const char* neg_dir,
                                double* dr, double* fpr) {
    if (!c || !pos_dir || !neg_dir) return fail_arg("null argument");
    return guarded([&] {
        const auto pos = vj::load_sample_dir(pos_dir, 1, c->c.window_w, c->c.window_h);
        const auto neg = vj::load_sample_dir(neg_dir, 0, c->c.window_w, c->c.window_h);
        const vj::CascadeRates rates = vj::cascade_rates(c->c, pos, neg);
        if (dr) *dr = rates.dr;
        if (fpr) *fpr = rates.fpr;
    });
}

vj_status vj_corpus_generate(const char* dir, unsigned long long seed, int n_pos, int n_neg,
                             int n_scenes, int scene_w, int scene_h) {
    if (!dir) return fail_arg("null argument");
    return guarded([&] {
        vj::CorpusSpec spec;
        spec.seed = seed;
        spec.n_pos = n_pos;
        spec.n_neg = n_neg;
        spec.n_scenes = n_scenes;
        spec.scene_w = scene_w;
        spec.scene_h = scene_h;
        vj::write_corpus(vj::make_corpus(spec), dir);
    });
}

/* ---- platform & schedule simulation ---------------------------------- */

vj_status vj_platform_preset(const char* name, vj_platform** out) {
    if (!name || !out) return fail_arg("null argument");
    return guarded([&] { *out = new vj_platform{vj::platform_preset(name)}; });
}

vj_status vj_platform_load(const char* path, vj_platform** out) {
    if (!path || !out) return fail_arg("null argument");
    return guarded([&] { *out = new vj_platform{vj::load_platform(path)}; });
}

vj_status vj_platform_save(const vj_platform* p, const char* path) {
    if (!p || !path) return fail_arg("null argument");
    return guarded([&] { vj::save_platform(p->p, path); });
}

vj_status vj_platform_set_frequency(vj_platform* p, const char* cluster, int mhz) {
    if (!p || !cluster) return fail_arg("null argument");
    return guarded([&] { p->p.set_freq(parse_cluster_name(cluster), mhz); });
}

void vj_platform_free(vj_platform* p) { delete p; }

vj_status vj_taskgraph_build(int img_w, int img_h, const vj_detect_params* p, int block_cols,
                             double mean_weak_evals, vj_taskgraph** out) {
    if (!out) return fail_arg("null argument");
    return guarded([&] {
        *out = new vj_taskgraph{
            vj::build_detection_dag(img_w, img_h, to_params(p), block_cols, mean_weak_evals)};
    });
}

int vj_taskgraph_nodes(const vj_taskgraph* g) {
    return g ? static_cast<int>(g->g.nodes.size()) : 0;
}
long long vj_taskgraph_edges(const vj_taskgraph* g) {
    return g ? static_cast<long long>(g->g.edge_count()) : 0;
}

vj_status vj_taskgraph_save_dot(const vj_taskgraph* g, const char* path) {
    if (!g || !path) return fail_arg("null argument");
    return guarded([&] { vj::write_text_file(path, vj::export_dot(g->g)); });
}

void vj_taskgraph_free(vj_taskgraph* g) { delete g; }

vj_status vj_simulate(const vj_taskgraph* g, const vj_platform* p, const char* policy,
                      vj_schedule** out) {
    if (!g || !p || !policy || !out) return fail_arg("null argument");
    return guarded([&] {
        vj::ScheduleResult s =
            vj::simulate_schedule(g->g, p->p, vj::policy_from_name(policy));
        vj::EnergyReport e = vj::energy_of(s, p->p);
        *out = new vj_schedule{std::move(s), e, p->p};
    });
}

double vj_schedule_makespan(const vj_schedule* s) { return s ? s->s.makespan : 0.0; }
double vj_schedule_joules(const vj_schedule* s) { return s ? s->e.total_j : 0.0; }
double vj_schedule_avg_watts(const vj_schedule* s) { return s ? s->e.avg_w : 0.0; }

vj_status vj_schedule_cluster_energy(const vj_schedule* s, const char* cluster, double* busy_s,
                                     double* idle_s, double* busy_j, double* idle_j) {
    if (!s || !cluster) return fail_arg("null argument");
    return guarded([&] {
        const vj::ClusterEnergy& e =
            parse_cluster_name(cluster) == vj::Cluster::big ? s->e.big : s->e.little;
        if (busy_s) *busy_s = e.busy_s;
        if (idle_s) *idle_s = e.idle_s;
        if (busy_j) *busy_j = e.busy_j;
        if (idle_j) *idle_j = e.idle_j;
    });
}

vj_status vj_schedule_save_csv(const vj_schedule* s, const char* path) {
    if (!s || !path) return fail_arg("null argument");
    return guarded([&] { vj::write_text_file(path, vj::schedule_csv(s->s, s->platform)); });
}

void vj_schedule_free(vj_schedule* s) { delete s; }

namespace {

vj_sweep_record to_c_record(const vj::SweepRecord& r) {
    vj_sweep_record out{};
    std::snprintf(out.policy, sizeof out.policy, "%s", r.policy.c_str());
    out.big_mhz = r.big_mhz;
    out.little_mhz = r.little_mhz;
    out.step = r.step;
    out.scale = r.scale;
    out.makespan_s = r.makespan_s;
    out.joules = r.joules;
    out.avg_w = r.avg_w;
    out.total_error = r.total_error;
    return out;
}

vj::SweepRecord from_c_record(const vj_sweep_record& r) {
    vj::SweepRecord out;
    out.policy = r.policy;
    out.big_mhz = r.big_mhz;
    out.little_mhz = r.little_mhz;
    out.step = r.step;
    out.scale = r.scale;
    out.makespan_s = r.makespan_s;
    out.joules = r.joules;
    out.avg_w = r.avg_w;
    out.total_error = r.total_error;
    return out;
}

} // namespace

vj_status vj_dvfs_sweep(const vj_taskgraph* g, const vj_platform* p, const int* big_freqs,
                        int n_freqs, int little_mhz, const char* const* policies,
                        int n_policies, double slack, vj_sweep_record* records, int cap,
                        int* n_out, int* best_index) {
    if (!g || !p || !big_freqs || !policies || !records || !n_out)
        return fail_arg("null argument");
    return guarded([&] {
        std::vector<int> freqs(big_freqs, big_freqs + n_freqs);
        std::vector<vj::Policy> pols;
        for (int i = 0; i < n_policies; ++i) pols.push_back(vj::policy_from_name(policies[i]));
        const vj::DvfsSweepResult result =
            vj::dvfs_sweep(g->g, p->p, freqs, little_mhz, pols, slack);
        *n_out = static_cast<int>(result.records.size());
        for (int i = 0; i < *n_out && i < cap; ++i)
            records[i] = to_c_record(result.records[static_cast<std::size_t>(i)]);
        if (best_index) *best_index = result.best_index;
    });
}

vj_status vj_sweep_csv_save(const vj_sweep_record* records, int n,
                            const unsigned long long* windows_scanned, const char* path) {
    if ((n > 0 && !records) || !path) return fail_arg("null argument");
    return guarded([&] {
        std::vector<vj::SweepRecord> rs;
        for (int i = 0; i < n; ++i) rs.push_back(from_c_record(records[i]));
        if (windows_scanned) {
            std::vector<unsigned long long> w(windows_scanned, windows_scanned + n);
            vj::write_text_file(path, vj::sweep_csv_with_windows(rs, w));
        } else {
            vj::write_text_file(path, vj::sweep_csv(rs));
        }
    });
}

vj_status vj_sweep_svg_save(const vj_sweep_record* records, int n, const char* title,
                            const char* path) {
    if ((n > 0 && !records) || !path) return fail_arg("null argument");
    return guarded([&] {
        std::vector<vj::SweepRecord> rs;
        for (int i = 0; i < n; ++i) rs.push_back(from_c_record(records[i]));
        vj::write_text_file(path, vj::svg_scatter(rs, title ? title : "sweep"));
    });
}

} // extern "C"
