#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vj/cascade.hpp"
#include "vj/image.hpp"

namespace vj {

/// One training example: a window the size of the cascade window, its cached
/// integral tables and sigma*N, and a {0,1} label (1 = positive).
struct Sample {
    GrayImage window;
    IntegralPair integral;
    std::uint64_t sigma_n = 0;
    int label = 0;

    static Sample make(GrayImage img, int label);
};

/// Per-round boosting record: the selected weak classifier and the Fig.-3
/// quantities epsilon_t, beta_t = eps/(1-eps), alpha_t = ln(1/beta_t).
struct BoostRound {
    WeakClassifier weak;
    std::size_t feature_index = 0;
    double epsilon = 0.0;
    double beta = 0.0;
    double alpha = 0.0;
    double weight_sum = 0.0; // sum of sample weights right after normalization
};

struct BoostResult {
    Stage stage; // threshold defaults to 1/2 * sum(alpha), fixed-point
    std::vector<BoostRound> rounds;
};

struct BestWeak {
    WeakClassifier weak;
    std::size_t feature_index = 0;
    double epsilon = 0.0;
    double threshold_real = 0.0; // pre-quantization threshold
};

/// Normalized feature value used throughout training: the raw feature sum
/// scaled to fixed point and divided by the sample's sigma*N (floored at 1
/// for flat windows), matching the runtime comparison
/// raw*2^12 < threshold*sigmaN.
double normalized_feature_value(const HaarFeature& f, const Sample& s);

/// Exact minimizer of the weighted error over (feature, threshold, polarity):
/// per feature, samples are sorted by value and a single scan evaluates every
/// split with error = min(S+ + (T- - S-), S- + (T+ - S+)). Ties break toward
/// the lowest feature index, then the lowest threshold. Weights must be
/// normalized.
BestWeak best_weak(const std::vector<HaarFeature>& features,
                   const std::vector<Sample>& samples,
                   const std::vector<double>& weights);

/// AdaBoost: weights start at 1/(2m) per negative and 1/(2l) per positive,
/// each round normalizes weights, selects best_weak, and decays the weights
/// of correctly classified samples by beta_t. A round with epsilon == 0
/// terminates boosting early with a single large-alpha classifier; a round
/// with epsilon >= 0.5 throws TrainError ("no weak learner better than
/// chance").
BoostResult adaboost_train(const std::vector<Sample>& samples,
                           const std::vector<HaarFeature>& features, int rounds);

struct StageTargets {
    double d_min = 0.99;        // per-stage detection rate to hit on positives
    double f_max = 0.5;         // per-stage false positive rate ceiling
    int max_stages = 5;
    int max_weak_per_stage = 64; // feature budget per stage
};

struct StageRates {
    double d = 1.0; // conditional detection rate of this stage
    double f = 1.0; // conditional false positive rate of this stage
};

struct TrainedCascade {
    Cascade cascade;
    std::vector<StageRates> per_stage; // measured on the training pools
    bool complete = true;              // false when the negative pool ran dry early
    std::string warning;
};

/// Builds a cascade stage by stage: each stage grows weak classifiers until,
/// with its threshold lowered to the largest value keeping d_min of the
/// positives, the false-positive rate on the current negative pool is at
/// most f_max (or the per-stage budget is spent). Negatives surviving the
/// new stage form the next stage's pool; training stops at max_stages or
/// when the pool empties.
TrainedCascade train_cascade(const std::vector<Sample>& pos,
                             const std::vector<Sample>& neg,
                             const StageTargets& targets,
                             const std::vector<HaarFeature>& features);

/// Stage sum of one cached sample window (origin 0,0, its own sigma*N).
std::int64_t stage_sum(const Stage& s, const Sample& sample);

/// Largest stage threshold keeping at least ceil(d_min * |pos|) positives.
std::int32_t stage_threshold_for_dmin(const Stage& s, const std::vector<Sample>& pos,
                                      double d_min);

struct CascadeRates {
    double dr = 0.0;  // measured whole-cascade detection rate
    double fpr = 0.0; // measured whole-cascade false positive rate
    std::vector<StageRates> per_stage; // conditional rates on survivors
    double dr_product = 0.0;  // product of per-stage d_i
    double fpr_product = 0.0; // product of per-stage f_i
};

/// Empirical rates of a cascade on labelled pools, both whole-cascade and
/// per-stage conditional (measured on survivors of the preceding stages).
CascadeRates cascade_rates(const Cascade& c, const std::vector<Sample>& pos,
                           const std::vector<Sample>& neg);

/// Loads every .pgm in a directory as a sample window with the given label,
/// in sorted filename order. Throws IoError/ParseError on unreadable files
/// and ArgError when a window does not match (window_w, window_h).
std::vector<Sample> load_sample_dir(const std::string& dir, int label,
                                    int window_w = 24, int window_h = 24);

} // namespace vj
