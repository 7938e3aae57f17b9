/* vjamp.h - C interface to the vjamp face-detection and scheduling library.
 *
 * All functions return vj_status unless noted; on VJ_OK outputs are valid,
 * otherwise vj_last_error() holds a message for the calling thread. Objects
 * returned through vj_*_out pointers are owned by the caller and released
 * with the matching vj_*_free function.
 */
#ifndef VJAMP_H
#define VJAMP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define VJ_API __attribute__((visibility("default")))

typedef enum vj_status {
    VJ_OK = 0,
    VJ_ERR_IO = 1,
    VJ_ERR_PARSE = 2,
    VJ_ERR_ARG = 3,
    VJ_ERR_BOUNDS = 4,
    VJ_ERR_TRAIN = 5,
    VJ_ERR_GRAPH = 6,
    VJ_ERR_INTERNAL = 7
} vj_status;

/* Message of the last failing call on this thread; empty string if none. */
VJ_API const char* vj_last_error(void);
VJ_API const char* vj_version(void);

/* ---- images ---------------------------------------------------------- */

typedef struct vj_image vj_image;

VJ_API vj_status vj_image_load(const char* path, vj_image** out);
VJ_API vj_status vj_image_create(int width, int height, const uint8_t* data, vj_image** out);
VJ_API int vj_image_width(const vj_image* img);
VJ_API int vj_image_height(const vj_image* img);
VJ_API const uint8_t* vj_image_data(const vj_image* img);
VJ_API vj_status vj_image_save_pgm(const vj_image* img, const char* path);
VJ_API void vj_image_free(vj_image* img);

/* ---- cascades -------------------------------------------------------- */

typedef struct vj_cascade vj_cascade;

VJ_API vj_status vj_cascade_load(const char* path, vj_cascade** out);
VJ_API vj_status vj_cascade_parse(const char* text, vj_cascade** out);
VJ_API vj_status vj_cascade_save(const vj_cascade* c, const char* path);
VJ_API int vj_cascade_stages(const vj_cascade* c);
VJ_API long long vj_cascade_weak_total(const vj_cascade* c);
VJ_API int vj_cascade_window_w(const vj_cascade* c);
VJ_API int vj_cascade_window_h(const vj_cascade* c);
/* Structural warnings, one per line; empty string when clean. The returned
 * buffer lives until the next call on the same cascade. */
VJ_API const char* vj_cascade_lint(vj_cascade* c);
VJ_API void vj_cascade_free(vj_cascade* c);

/* ---- detection ------------------------------------------------------- */

typedef struct vj_detect_params {
    double scale_factor;      /* pyramid ratio, default 1.2 */
    int step;                 /* window slide in pixels, default 1 */
    int min_window;           /* smallest face size, default 24 */
    int group_min_neighbors;  /* default 2; 0 disables grouping */
    double group_overlap;     /* IoU for clustering raw boxes, default 0.4 */
} vj_detect_params;

VJ_API void vj_detect_params_init(vj_detect_params* p);

typedef struct vj_detections vj_detections;

VJ_API vj_status vj_detect(const vj_image* img, const vj_cascade* c,
                           const vj_detect_params* p, int workers, vj_detections** out);
VJ_API int vj_detections_count(const vj_detections* d);
VJ_API void vj_detections_get(const vj_detections* d, int index, int* x, int* y, int* w,
                              int* h, int* score);
VJ_API double vj_detections_elapsed_s(const vj_detections* d);
VJ_API unsigned long long vj_detections_integral_value(const vj_detections* d);
VJ_API unsigned long long vj_detections_windows_scanned(const vj_detections* d);
VJ_API unsigned long long vj_detections_weak_evals(const vj_detections* d);
VJ_API void vj_detections_free(vj_detections* d);

/* Writes a P6 copy of the image with white 1-pixel outlines per detection. */
VJ_API vj_status vj_image_annotate_ppm(const vj_image* img, const vj_detections* d,
                                       const char* path);

/* (elapsed * integral value) / faces; VJ_ERR_ARG when n_faces == 0. */
VJ_API vj_status vj_rit(double elapsed_s, unsigned long long integral_value,
                        long long n_faces, double* out);

/* ---- evaluation ------------------------------------------------------ */

/* Boxes are flat arrays of x,y,w,h quadruples. */
VJ_API vj_status vj_match_detections(const int* det_xywh, int n_det, const int* truth_xywh,
                                     int n_truth, double iou_min, long long* tp,
                                     long long* fp, long long* fn);
/* has_* are 0 when the ratio is undefined (n/a), 1 otherwise. */
VJ_API vj_status vj_precision_recall(long long tp, long long fp, long long fn,
                                     double* precision, int* has_precision, double* recall,
                                     int* has_recall);

typedef struct vj_manifest vj_manifest;

VJ_API vj_status vj_manifest_load(const char* path, vj_manifest** out);
VJ_API int vj_manifest_count(const vj_manifest* m);
VJ_API const char* vj_manifest_path(const vj_manifest* m, int index);
VJ_API int vj_manifest_face_count(const vj_manifest* m, int index);
/* Copies up to cap x,y,w,h quadruples; returns the face count. */
VJ_API int vj_manifest_faces(const vj_manifest* m, int index, int* xywh, int cap);
VJ_API void vj_manifest_free(vj_manifest* m);

/* ---- training -------------------------------------------------------- */

typedef struct vj_train_params {
    int max_stages;          /* default 5 */
    double d_min;            /* per-stage detection target, default 0.99 */
    double f_max;            /* per-stage false-positive ceiling, default 0.5 */
    int max_weak_per_stage;  /* default 64 */
    int feature_stride;      /* feature grid position step, default 2 */
    int feature_size_step;   /* feature grid size step, default 2 */
} vj_train_params;

VJ_API void vj_train_params_init(vj_train_params* p);

/* Trains on directories of 24x24 PGM windows (sorted filename order, fully
 * deterministic). Returns the cascade and optionally the rates measured on
 * the training pools. */
VJ_API vj_status vj_train(const char* pos_dir, const char* neg_dir,
                          const vj_train_params* p, vj_cascade** out);
VJ_API vj_status vj_cascade_rates_dirs(const vj_cascade* c, const char* pos_dir,
                                       const char* neg_dir, double* dr, double* fpr);

/* Deterministic synthetic corpus: pos/, neg/, scenes/ plus manifest.txt. */
VJ_API vj_status vj_corpus_generate(const char* dir, unsigned long long seed, int n_pos,
                                    int n_neg, int n_scenes, int scene_w, int scene_h);

/* ---- platform & schedule simulation ---------------------------------- */

typedef struct vj_platform vj_platform;
typedef struct vj_taskgraph vj_taskgraph;
typedef struct vj_schedule vj_schedule;

VJ_API vj_status vj_platform_preset(const char* name, vj_platform** out);
VJ_API vj_status vj_platform_load(const char* path, vj_platform** out);
VJ_API vj_status vj_platform_save(const vj_platform* p, const char* path);
VJ_API vj_status vj_platform_set_frequency(vj_platform* p, const char* cluster, int mhz);
VJ_API void vj_platform_free(vj_platform* p);

VJ_API vj_status vj_taskgraph_build(int img_w, int img_h, const vj_detect_params* p,
                                    int block_cols, double mean_weak_evals,
                                    vj_taskgraph** out);
VJ_API int vj_taskgraph_nodes(const vj_taskgraph* g);
VJ_API long long vj_taskgraph_edges(const vj_taskgraph* g);
VJ_API vj_status vj_taskgraph_save_dot(const vj_taskgraph* g, const char* path);
VJ_API void vj_taskgraph_free(vj_taskgraph* g);

/* policy: botlev, fifo_asym, big_only_sequential or all_cores_fifo. */
VJ_API vj_status vj_simulate(const vj_taskgraph* g, const vj_platform* p, const char* policy,
                             vj_schedule** out);
VJ_API double vj_schedule_makespan(const vj_schedule* s);
VJ_API double vj_schedule_joules(const vj_schedule* s);
VJ_API double vj_schedule_avg_watts(const vj_schedule* s);
VJ_API vj_status vj_schedule_cluster_energy(const vj_schedule* s, const char* cluster,
                                            double* busy_s, double* idle_s, double* busy_j,
                                            double* idle_j);
VJ_API vj_status vj_schedule_save_csv(const vj_schedule* s, const char* path);
VJ_API void vj_schedule_free(vj_schedule* s);

typedef struct vj_sweep_record {
    char policy[24];
    int big_mhz;
    int little_mhz;
    int step;
    double scale;
    double makespan_s;
    double joules;
    double avg_w;
    long long total_error;
} vj_sweep_record;

/* Fills up to cap records (big_freqs x policies); *n_out is the total and
 * *best_index flags the minimum-energy record meeting the makespan
 * constraint (slack times the best makespan), -1 if none. */
VJ_API vj_status vj_dvfs_sweep(const vj_taskgraph* g, const vj_platform* p,
                               const int* big_freqs, int n_freqs, int little_mhz,
                               const char* const* policies, int n_policies, double slack,
                               vj_sweep_record* records, int cap, int* n_out,
                               int* best_index);

/* Canonical sweep CSV writer; windows_scanned may be NULL to omit the extra
 * column. */
VJ_API vj_status vj_sweep_csv_save(const vj_sweep_record* records, int n,
                                   const unsigned long long* windows_scanned,
                                   const char* path);
/* Scatter plot (energy vs time, annotated with total_error) as SVG. */
VJ_API vj_status vj_sweep_svg_save(const vj_sweep_record* records, int n, const char* title,
                                   const char* path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* VJAMP_H */
