#include "vj/train.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "vj/error.hpp"
#include "vj/pnm.hpp"

namespace vj {

namespace {

// Alpha used when a round separates the data perfectly; Fig-3 style alpha
// would be infinite there.
constexpr double kPerfectAlpha = 27.631021115928547; // ln(1e12)

std::int32_t to_fixed(double v) {
    const double scaled = std::round(v * static_cast<double>(kFixedOne));
    const double lo = static_cast<double>(std::numeric_limits<std::int32_t>::min());
    const double hi = static_cast<double>(std::numeric_limits<std::int32_t>::max());
    return static_cast<std::int32_t>(std::clamp(scaled, lo, hi));
}

// Candidate threshold/polarity for one feature. Polarity +1 predicts
// positive below the threshold, -1 above (Eq.-2 style inversion).
struct Split {
    double epsilon = 1.0;
    double theta = 0.0;
    int polarity = +1;
    bool valid = false;

    // Order: lower error, then lower threshold, then left-positive first.
    bool better_than(const Split& o) const {
        if (!o.valid) return valid;
        if (epsilon != o.epsilon) return epsilon < o.epsilon;
        if (theta != o.theta) return theta < o.theta;
        return polarity > o.polarity;
    }
};

// Per-(feature, sample) normalized values plus per-feature sample orderings,
// built once and reused across boosting rounds.
struct FeatureTable {
    std::size_t n_features = 0;
    std::size_t n_samples = 0;
    std::vector<double> values;        // [feature][sample]
    std::vector<std::uint32_t> order;  // [feature][rank] -> sample index
    std::vector<int> labels;

    const double* row(std::size_t f) const { return values.data() + f * n_samples; }
    const std::uint32_t* row_order(std::size_t f) const { return order.data() + f * n_samples; }
};

FeatureTable build_table(const std::vector<HaarFeature>& features,
                         const std::vector<Sample>& samples) {
    FeatureTable t;
    t.n_features = features.size();
    t.n_samples = samples.size();
    t.values.resize(t.n_features * t.n_samples);
    t.order.resize(t.n_features * t.n_samples);
    t.labels.reserve(samples.size());
    for (const Sample& s : samples) t.labels.push_back(s.label);

    for (std::size_t f = 0; f < t.n_features; ++f) {
        double* row = t.values.data() + f * t.n_samples;
        for (std::size_t i = 0; i < t.n_samples; ++i)
            row[i] = normalized_feature_value(features[f], samples[i]);
        std::uint32_t* ord = t.order.data() + f * t.n_samples;
        std::iota(ord, ord + t.n_samples, 0u);
        std::sort(ord, ord + t.n_samples, [row](std::uint32_t a, std::uint32_t b) {
            return row[a] != row[b] ? row[a] < row[b] : a < b;
        });
    }
    return t;
}

// Single pass over one feature's sorted samples. At the split after rank k
// the below-threshold mass is (s_pos, s_neg) and the error is
// min(S+ + (T- - S-), S- + (T+ - S+)); candidate thresholds are midpoints of
// adjacent distinct values plus sentinels outside the value range.
Split scan_feature(const FeatureTable& t, std::size_t f, const std::vector<double>& weights) {
    const double* vals = t.row(f);
    const std::uint32_t* ord = t.row_order(f);
    const std::size_t n = t.n_samples;

    double total_pos = 0.0, total_neg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (t.labels[i] == 1)
            total_pos += weights[i];
        else
            total_neg += weights[i];
    }

    Split best;
    double s_pos = 0.0, s_neg = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        double theta;
        if (k == 0) {
            theta = vals[ord[0]] - 1.0;
        } else if (k == n) {
            theta = vals[ord[n - 1]] + 1.0;
        } else if (vals[ord[k - 1]] == vals[ord[k]]) {
            // No threshold separates equal values; advance the prefix and
            // move on (ord[k] joins the below-split mass for split k+1).
            const std::uint32_t i = ord[k];
            if (t.labels[i] == 1)
                s_pos += weights[i];
            else
                s_neg += weights[i];
            continue;
        } else {
            theta = (vals[ord[k - 1]] + vals[ord[k]]) / 2.0;
        }

        const double err_below_pos = s_neg + (total_pos - s_pos); // positive iff v < theta
        const double err_above_pos = s_pos + (total_neg - s_neg); // positive iff v >= theta
        Split cand{err_below_pos, theta, +1, true};
        if (err_above_pos < err_below_pos) cand = Split{err_above_pos, theta, -1, true};
        if (cand.better_than(best)) best = cand;

        if (k < n) {
            const std::uint32_t i = ord[k];
            if (t.labels[i] == 1)
                s_pos += weights[i];
            else
                s_neg += weights[i];
        }
    }
    return best;
}

WeakClassifier make_weak(const HaarFeature& f, const Split& split, double alpha) {
    WeakClassifier wc;
    wc.feature = f;
    wc.threshold = to_fixed(split.theta / static_cast<double>(kFixedOne));
    const std::int32_t a = std::max<std::int32_t>(1, to_fixed(alpha));
    if (split.polarity > 0) {
        wc.left_val = a; // below threshold predicts positive
        wc.right_val = 0;
    } else {
        wc.left_val = 0;
        wc.right_val = a;
    }
    return wc;
}

bool predicts_positive(const Split& split, double value) {
    return split.polarity > 0 ? value < split.theta : value >= split.theta;
}

struct RoundPick {
    std::size_t feature = 0;
    Split split;
};

RoundPick pick_round(const FeatureTable& t, const std::vector<double>& weights) {
    RoundPick best;
    for (std::size_t f = 0; f < t.n_features; ++f) {
        const Split s = scan_feature(t, f, weights);
        if (!best.split.valid || s.epsilon < best.split.epsilon) {
            best.feature = f;
            best.split = s;
        }
    }
    return best;
}

// Incremental AdaBoost driver shared by adaboost_train and train_cascade.
class Booster {
public:
    Booster(const std::vector<Sample>& samples, const std::vector<HaarFeature>& features)
        : features_(features), table_(build_table(features, samples)) {
        std::size_t m = 0, l = 0;
        for (const Sample& s : samples) (s.label == 1 ? l : m)++;
        if (l == 0 || m == 0)
            throw ArgError("adaboost: need at least one positive and one negative sample");
        weights_.resize(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i)
            weights_[i] = samples[i].label == 1 ? 1.0 / (2.0 * static_cast<double>(l))
                                                : 1.0 / (2.0 * static_cast<double>(m));
    }

    // Runs one boosting round. Returns false when the round separated the
    // data perfectly (sentinel alpha emitted, boosting cannot continue).
    bool round() {
        if (done_) return false;
        normalize();
        const double weight_sum = std::accumulate(weights_.begin(), weights_.end(), 0.0);
        const RoundPick pick = pick_round(table_, weights_);
        if (!pick.split.valid) throw TrainError("no usable threshold split found");
        if (pick.split.epsilon >= 0.5)
            throw TrainError("no weak learner better than chance (epsilon = " +
                             std::to_string(pick.split.epsilon) + ")");

        BoostRound r;
        r.feature_index = pick.feature;
        r.epsilon = pick.split.epsilon;
        r.weight_sum = weight_sum;
        if (pick.split.epsilon == 0.0) {
            r.beta = 0.0;
            r.alpha = kPerfectAlpha;
            r.weak = make_weak(features_[pick.feature], pick.split, r.alpha);
            rounds_.push_back(std::move(r));
            done_ = true;
            return false;
        }
        r.beta = pick.split.epsilon / (1.0 - pick.split.epsilon);
        r.alpha = std::log(1.0 / r.beta);
        r.weak = make_weak(features_[pick.feature], pick.split, r.alpha);

        const double* vals = table_.row(pick.feature);
        for (std::size_t i = 0; i < weights_.size(); ++i) {
            const bool correct = predicts_positive(pick.split, vals[i]) == (table_.labels[i] == 1);
            if (correct) weights_[i] *= r.beta;
        }
        rounds_.push_back(std::move(r));
        return true;
    }

    const std::vector<BoostRound>& rounds() const { return rounds_; }
    const std::vector<double>& weights() const { return weights_; }

    Stage stage_with_default_threshold() const {
        Stage s;
        double alpha_sum = 0.0;
        for (const BoostRound& r : rounds_) {
            s.weak.push_back(r.weak);
            alpha_sum += r.alpha;
        }
        s.threshold = to_fixed(alpha_sum / 2.0);
        return s;
    }

private:
    void normalize() {
        const double sum = std::accumulate(weights_.begin(), weights_.end(), 0.0);
        if (sum <= 0.0) throw TrainError("weight sum collapsed to zero");
        for (double& w : weights_) w /= sum;
    }

    const std::vector<HaarFeature>& features_;
    FeatureTable table_;
    std::vector<double> weights_;
    std::vector<BoostRound> rounds_;
    bool done_ = false;
};

std::int32_t lowered_threshold(const Stage& stage, const std::vector<const Sample*>& pos,
                               double d_min) {
    std::vector<std::int64_t> sums;
    sums.reserve(pos.size());
    for (const Sample* s : pos) sums.push_back(stage_sum(stage, *s));
    std::sort(sums.begin(), sums.end(), std::greater<>());
    const std::size_t need = std::min(
        pos.size(),
        static_cast<std::size_t>(std::ceil(d_min * static_cast<double>(pos.size()))));
    const std::int64_t t =
        need == 0 ? std::numeric_limits<std::int32_t>::min() : sums[need - 1];
    return static_cast<std::int32_t>(
        std::clamp<std::int64_t>(t, std::numeric_limits<std::int32_t>::min(),
                                 std::numeric_limits<std::int32_t>::max()));
}

} // namespace

std::int64_t stage_sum(const Stage& s, const Sample& sample) {
    std::int64_t sum = 0;
    for (const WeakClassifier& wc : s.weak)
        sum += eval_weak(wc, sample.integral, 0, 0, sample.sigma_n);
    return sum;
}

std::int32_t stage_threshold_for_dmin(const Stage& s, const std::vector<Sample>& pos,
                                      double d_min) {
    std::vector<const Sample*> ptrs;
    ptrs.reserve(pos.size());
    for (const Sample& p : pos) ptrs.push_back(&p);
    return lowered_threshold(s, ptrs, d_min);
}

Sample Sample::make(GrayImage img, int label) {
    Sample s;
    s.integral = compute_integrals(img);
    s.sigma_n = window_stddev(s.integral, 0, 0, img.width, img.height);
    s.window = std::move(img);
    s.label = label;
    return s;
}

double normalized_feature_value(const HaarFeature& f, const Sample& s) {
    const std::int64_t raw = eval_feature(f, s.integral, 0, 0);
    const std::uint64_t divisor = s.sigma_n > 0 ? s.sigma_n : 1;
    return static_cast<double>(raw * kFixedOne) / static_cast<double>(divisor);
}

BestWeak best_weak(const std::vector<HaarFeature>& features, const std::vector<Sample>& samples,
                   const std::vector<double>& weights) {
    if (features.empty()) throw ArgError("best_weak: empty feature list");
    if (samples.empty()) throw ArgError("best_weak: no samples");
    if (weights.size() != samples.size())
        throw ArgError("best_weak: weight/sample count mismatch");

    const FeatureTable t = build_table(features, samples);
    const RoundPick pick = pick_round(t, weights);
    BestWeak out;
    out.feature_index = pick.feature;
    out.epsilon = pick.split.epsilon;
    out.threshold_real = pick.split.theta;
    // Alpha is not defined by a single call; emit a unit-vote classifier.
    out.weak = make_weak(features[pick.feature], pick.split, 1.0);
    return out;
}

BoostResult adaboost_train(const std::vector<Sample>& samples,
                           const std::vector<HaarFeature>& features, int rounds) {
    if (rounds < 1) throw ArgError("adaboost_train: rounds must be >= 1");
    if (features.empty()) throw ArgError("adaboost_train: empty feature list");
    Booster b(samples, features);
    for (int t = 0; t < rounds; ++t) {
        if (!b.round()) break;
    }
    BoostResult result;
    result.stage = b.stage_with_default_threshold();
    result.rounds = b.rounds();
    return result;
}

TrainedCascade train_cascade(const std::vector<Sample>& pos, const std::vector<Sample>& neg,
                             const StageTargets& targets,
                             const std::vector<HaarFeature>& features) {
    if (pos.empty() || neg.empty()) throw ArgError("train_cascade: empty sample pool");
    if (targets.max_stages < 1) throw ArgError("train_cascade: max_stages must be >= 1");
    if (!(targets.d_min > 0.0 && targets.d_min <= 1.0))
        throw ArgError("train_cascade: d_min must be in (0, 1]");
    if (!(targets.f_max > 0.0 && targets.f_max < 1.0))
        throw ArgError("train_cascade: f_max must be in (0, 1)");

    TrainedCascade out;
    std::vector<const Sample*> pos_ptrs;
    pos_ptrs.reserve(pos.size());
    for (const Sample& s : pos) pos_ptrs.push_back(&s);
    std::vector<const Sample*> neg_pool;
    neg_pool.reserve(neg.size());
    for (const Sample& s : neg) neg_pool.push_back(&s);

    for (int si = 0; si < targets.max_stages; ++si) {
        if (neg_pool.empty()) {
            out.warning = "negative pool exhausted before stage " + std::to_string(si + 1);
            out.complete = si > 0;
            break;
        }

        std::vector<Sample> stage_samples;
        stage_samples.reserve(pos.size() + neg_pool.size());
        for (const Sample* s : pos_ptrs) stage_samples.push_back(*s);
        for (const Sample* s : neg_pool) stage_samples.push_back(*s);

        Booster booster(stage_samples, features);
        Stage stage;
        bool more_rounds = true;
        for (int w = 0; w < targets.max_weak_per_stage && more_rounds; ++w) {
            try {
                more_rounds = booster.round();
            } catch (const TrainError&) {
                if (booster.rounds().empty()) throw; // nothing learnable at all
                more_rounds = false;
            }
            stage = booster.stage_with_default_threshold();
            stage.threshold = lowered_threshold(stage, pos_ptrs, targets.d_min);

            std::size_t false_pos = 0;
            for (const Sample* s : neg_pool)
                if (stage_sum_on_sample(stage, *s) >= stage.threshold) ++false_pos;
            const double f_i =
                static_cast<double>(false_pos) / static_cast<double>(neg_pool.size());
            if (f_i <= targets.f_max) break;
        }

        // Measured rates of the finished stage: d on the full positive set,
        // f on the current bootstrapped pool.
        std::size_t pass_pos = 0;
        for (const Sample* s : pos_ptrs)
            if (stage_sum_on_sample(stage, *s) >= stage.threshold) ++pass_pos;
        std::vector<const Sample*> next_pool;
        for (const Sample* s : neg_pool)
            if (stage_sum_on_sample(stage, *s) >= stage.threshold) next_pool.push_back(s);

        StageRates rates;
        rates.d = static_cast<double>(pass_pos) / static_cast<double>(pos_ptrs.size());
        rates.f = static_cast<double>(next_pool.size()) / static_cast<double>(neg_pool.size());
        out.per_stage.push_back(rates);
        out.cascade.stages.push_back(std::move(stage));
        neg_pool = std::move(next_pool);
    }

    if (out.cascade.stages.empty())
        throw TrainError("train_cascade: produced no stages");
    return out;
}

CascadeRates cascade_rates(const Cascade& c, const std::vector<Sample>& pos,
                           const std::vector<Sample>& neg) {
    if (pos.empty() || neg.empty()) throw ArgError("cascade_rates: empty sample pool");
    CascadeRates out;

    auto survivors_per_stage = [&](const std::vector<Sample>& pool) {
        std::vector<std::size_t> alive{pool.size()};
        std::vector<const Sample*> current;
        current.reserve(pool.size());
        for (const Sample& s : pool) current.push_back(&s);
        for (const Stage& stage : c.stages) {
            std::vector<const Sample*> next;
            for (const Sample* s : current)
                if (stage_sum_on_sample(stage, *s) >= stage.threshold) next.push_back(s);
            alive.push_back(next.size());
            current = std::move(next);
        }
        return alive;
    };

    const auto pos_alive = survivors_per_stage(pos);
    const auto neg_alive = survivors_per_stage(neg);

    out.dr_product = 1.0;
    out.fpr_product = 1.0;
    for (std::size_t i = 1; i < pos_alive.size(); ++i) {
        StageRates r;
        r.d = pos_alive[i - 1] > 0 ? static_cast<double>(pos_alive[i]) /
                                         static_cast<double>(pos_alive[i - 1])
                                   : 1.0;
        r.f = neg_alive[i - 1] > 0 ? static_cast<double>(neg_alive[i]) /
                                         static_cast<double>(neg_alive[i - 1])
                                   : 1.0;
        out.per_stage.push_back(r);
        out.dr_product *= r.d;
        out.fpr_product *= r.f;
    }
    out.dr = static_cast<double>(pos_alive.back()) / static_cast<double>(pos.size());
    out.fpr = static_cast<double>(neg_alive.back()) / static_cast<double>(neg.size());
    return out;
}

std::vector<Sample> load_sample_dir(const std::string& dir, int label, int window_w,
                                    int window_h) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw IoError("not a directory: '" + dir + "'");
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".pgm")
            paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    std::vector<Sample> samples;
    samples.reserve(paths.size());
    for (const auto& p : paths) {
        GrayImage img = load_pnm(p.string());
        if (img.width != window_w || img.height != window_h)
            throw ArgError("sample '" + p.string() + "' is " + std::to_string(img.width) + "x" +
                           std::to_string(img.height) + ", want " + std::to_string(window_w) +
                           "x" + std::to_string(window_h));
        samples.push_back(Sample::make(std::move(img), label));
    }
    return samples;
}

} // namespace vj
