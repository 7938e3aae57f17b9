#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "vj/error.hpp"
#include "vj/features.hpp"
#include "vj/synth.hpp"
#include "vj/train.hpp"

using namespace vj;

namespace {

// A window that one horizontal-edge feature separates by brightness side.
GrayImage half_window(int bright_side, int lo, int hi) {
    GrayImage img(24, 24, static_cast<std::uint8_t>(lo));
    for (int y = 0; y < 24; ++y)
        for (int x = 0; x < 12; ++x) {
            const int xx = bright_side == 0 ? x : x + 12;
            img.at(xx, y) = static_cast<std::uint8_t>(hi);
        }
    return img;
}

std::vector<Sample> separable_samples() {
    std::vector<Sample> s;
    s.push_back(Sample::make(half_window(0, 40, 200), 1));
    s.push_back(Sample::make(half_window(0, 60, 220), 1));
    s.push_back(Sample::make(half_window(1, 40, 200), 0));
    s.push_back(Sample::make(half_window(1, 60, 220), 0));
    return s;
}

std::vector<HaarFeature> edge_feature_only() {
    HaarFeature f;
    f.rect_count = 2;
    f.rects[0] = {{0, 0, 12, 24}, +1};
    f.rects[1] = {{12, 0, 12, 24}, -1};
    return {f};
}

// Exhaustive reference search over (feature, candidate threshold, polarity),
// mirroring the contract's candidate set: midpoints of adjacent distinct
// sorted values plus sentinels outside the range.
struct OracleBest {
    std::size_t feature = 0;
    double epsilon = 2.0;
    double theta = 0.0;
    int polarity = +1;
};

OracleBest exhaustive_best(const std::vector<HaarFeature>& features,
                           const std::vector<Sample>& samples,
                           const std::vector<double>& weights) {
    OracleBest best;
    for (std::size_t fi = 0; fi < features.size(); ++fi) {
        std::vector<double> vals;
        for (const Sample& s : samples) vals.push_back(normalized_feature_value(features[fi], s));

        std::vector<double> sorted = vals;
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        std::vector<double> candidates{sorted.front() - 1.0, sorted.back() + 1.0};
        for (std::size_t i = 1; i < sorted.size(); ++i)
            candidates.push_back((sorted[i - 1] + sorted[i]) / 2.0);
        std::sort(candidates.begin(), candidates.end());

        for (double theta : candidates) {
            for (int polarity : {+1, -1}) {
                double eps = 0.0;
                for (std::size_t i = 0; i < samples.size(); ++i) {
                    const bool predicted =
                        polarity > 0 ? vals[i] < theta : vals[i] >= theta;
                    if (predicted != (samples[i].label == 1)) eps += weights[i];
                }
                const bool better =
                    eps < best.epsilon ||
                    (eps == best.epsilon && fi == best.feature &&
                     (theta < best.theta ||
                      (theta == best.theta && polarity > best.polarity)));
                if (better) best = OracleBest{fi, eps, theta, polarity};
            }
        }
    }
    return best;
}

// Random weights that are exact dyadic rationals summing to exactly 1, so the
// implementation's prefix-scan sums and the oracle's direct sums are equal
// bit for bit.
std::vector<double> dyadic_weights(Rng& rng, std::size_t n) {
    std::vector<std::uint64_t> parts(n, 1);
    std::uint64_t used = n;
    constexpr std::uint64_t kTotal = 1ull << 20;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t budget = (kTotal - used) / (n - i);
        const std::uint64_t extra = budget > 0 ? rng.below(static_cast<std::uint32_t>(budget)) : 0;
        parts[i] += extra;
        used += extra;
    }
    parts[n - 1] += kTotal - used;
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = static_cast<double>(parts[i]) / static_cast<double>(kTotal);
    return w;
}

} // namespace

TEST_CASE("enumerate_features matches a combinatorial oracle on a 4x4 window") {
    // Positions/sizes per template shape (kx, ky):
    auto count_template = [](int win, int kx, int ky) {
        long long n = 0;
        for (int w = 1; kx * w <= win; ++w)
            for (int h = 1; ky * h <= win; ++h) n += (win - kx * w + 1) * (win - ky * h + 1);
        return n;
    };
    const long long expected = count_template(4, 2, 1) + count_template(4, 1, 2) +
                               count_template(4, 3, 1) + count_template(4, 1, 3) +
                               count_template(4, 2, 2);
    const auto feats = enumerate_features(4, 4, 1, 1);
    CHECK(static_cast<long long>(feats.size()) == expected);
}

TEST_CASE("every enumerated feature fits the window and is zero-mean") {
    const auto feats = enumerate_features(12, 12, 2, 2);
    REQUIRE(!feats.empty());
    for (const HaarFeature& f : feats) {
        long long mean = 0;
        for (int i = 0; i < f.rect_count; ++i) {
            const WeightedRect& wr = f.rects[i];
            CHECK(wr.rect.x >= 0);
            CHECK(wr.rect.y >= 0);
            CHECK(wr.rect.x + wr.rect.w <= 12);
            CHECK(wr.rect.y + wr.rect.h <= 12);
            mean += static_cast<long long>(wr.weight) * wr.rect.w * wr.rect.h;
        }
        CHECK(mean == 0);
    }
}

TEST_CASE("exhaustive 24x24 feature count (reported for reference)") {
    const auto feats = enumerate_features(24, 24, 1, 1);
    CHECK(feats.size() == 162336u); // this template convention; published
                                    // Viola-Jones counts vary from ~45k up
    MESSAGE("exhaustive 24x24 feature count: ", feats.size());
}

TEST_CASE("best_weak separates {10,11} positives from {1,2} negatives") {
    // One feature whose values are controlled through window construction is
    // awkward; instead check on the separable corpus that epsilon hits 0 and
    // the threshold sits between the classes.
    const auto samples = separable_samples();
    const auto features = edge_feature_only();
    const std::vector<double> weights(4, 0.25);
    const BestWeak best = best_weak(features, samples, weights);
    CHECK(best.epsilon == 0.0);
    CHECK(best.feature_index == 0);
    // positives have strongly positive values, negatives strongly negative
    const double lo = std::max(normalized_feature_value(features[0], samples[2]),
                               normalized_feature_value(features[0], samples[3]));
    const double hi = std::min(normalized_feature_value(features[0], samples[0]),
                               normalized_feature_value(features[0], samples[1]));
    CHECK(best.threshold_real > lo);
    CHECK(best.threshold_real <= hi);
}

TEST_CASE("best_weak with all weight on one impossible sample ties at that weight") {
    // Two identical windows with opposite labels make every split misclassify
    // at least one of them; all the weight sits on the positive twin.
    std::vector<Sample> samples;
    samples.push_back(Sample::make(half_window(0, 50, 180), 1));
    samples.push_back(Sample::make(half_window(0, 50, 180), 0));
    samples.push_back(Sample::make(half_window(1, 50, 180), 0));
    std::vector<double> weights{1.0, 0.0, 0.0};

    std::vector<HaarFeature> features = edge_feature_only();
    HaarFeature vertical;
    vertical.rect_count = 2;
    vertical.rects[0] = {{0, 0, 24, 12}, +1};
    vertical.rects[1] = {{0, 12, 24, 12}, -1};
    features.push_back(vertical);

    const BestWeak best = best_weak(features, samples, weights);
    // The positive twin can always be classified correctly by a threshold
    // putting it alone on one side... except its negative twin shares the
    // value, so any split classifies both the same way; epsilon is either 0
    // (twin pair predicted positive, negative twin costs 0 weight) or 1.
    CHECK(best.epsilon == 0.0);
    CHECK(best.feature_index == 0); // tie broken toward the first feature
}

TEST_CASE("best_weak equals the exhaustive oracle on random instances") {
    Rng rng(97);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Sample> samples;
        for (int i = 0; i < 20; ++i)
            samples.push_back(Sample::make(oracle::random_image(rng, 24, 24), i % 2));
        std::vector<HaarFeature> features;
        for (int i = 0; i < 30; ++i) features.push_back(oracle::random_feature(rng));
        const auto weights = dyadic_weights(rng, samples.size());

        const BestWeak got = best_weak(features, samples, weights);
        const OracleBest want = exhaustive_best(features, samples, weights);
        CHECK(got.feature_index == want.feature);
        CHECK(got.epsilon == want.epsilon);
        CHECK(got.threshold_real == want.theta);
    }
}

TEST_CASE("best_weak argument validation") {
    const auto samples = separable_samples();
    CHECK_THROWS_AS(best_weak({}, samples, {}), ArgError);
    CHECK_THROWS_AS(best_weak(edge_feature_only(), {}, {}), ArgError);
}

TEST_CASE("adaboost reaches training error 0 in one round on separable data") {
    const auto samples = separable_samples();
    const BoostResult r = adaboost_train(samples, edge_feature_only(), 1);
    REQUIRE(r.rounds.size() == 1);
    CHECK(r.rounds[0].epsilon == 0.0);
    CHECK(r.rounds[0].alpha > 20.0); // perfect-separation sentinel

    int errors = 0;
    for (const Sample& s : samples) {
        std::int64_t sum = 0;
        for (const WeakClassifier& wc : r.stage.weak)
            sum += eval_weak(wc, s.integral, 0, 0, s.sigma_n);
        const bool predicted = sum >= r.stage.threshold;
        if (predicted != (s.label == 1)) ++errors;
    }
    CHECK(errors == 0);
}

TEST_CASE("adaboost aborts when every feature is chance") {
    // Positive and negative twins share every feature value.
    std::vector<Sample> samples;
    for (int i = 0; i < 4; ++i) {
        Rng rng(1000 + i);
        GrayImage img = oracle::random_image(rng, 24, 24);
        samples.push_back(Sample::make(img, 1));
        samples.push_back(Sample::make(img, 0));
    }
    CHECK_THROWS_WITH_AS(adaboost_train(samples, edge_feature_only(), 3),
                         doctest::Contains("better than chance"), TrainError);
}

TEST_CASE("adaboost per-round bookkeeping follows the reweighting rules") {
    Rng rng(103);
    std::vector<Sample> samples;
    for (int i = 0; i < 40; ++i) {
        GrayImage img = oracle::random_image(rng, 24, 24);
        // seed a weak signal: positives get a brighter left half
        const bool pos = i % 2 == 0;
        if (pos)
            for (int y = 0; y < 24; ++y)
                for (int x = 0; x < 12; ++x)
                    img.at(x, y) = static_cast<std::uint8_t>(std::min(255, img.at(x, y) + 70));
        samples.push_back(Sample::make(img, pos ? 1 : 0));
    }
    std::vector<HaarFeature> features = enumerate_features(24, 24, 8, 8);
    const BoostResult r = adaboost_train(samples, features, 3);
    REQUIRE(!r.rounds.empty());
    for (const BoostRound& round : r.rounds) {
        CHECK(round.weight_sum == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(round.epsilon < 0.5);
        if (round.beta > 0.0) {
            CHECK(round.beta == doctest::Approx(round.epsilon / (1.0 - round.epsilon)));
            CHECK(round.alpha == doctest::Approx(std::log(1.0 / round.beta)));
            CHECK(round.alpha > 0.0);
            CHECK(round.beta < 1.0);
        }
    }

    // Boosting dominance: the strong classifier's training error is no worse
    // than each individual round's weighted error bound.
    int strong_errors = 0;
    for (const Sample& s : samples) {
        std::int64_t sum = 0;
        for (const WeakClassifier& wc : r.stage.weak)
            sum += eval_weak(wc, s.integral, 0, 0, s.sigma_n);
        if ((sum >= r.stage.threshold) != (s.label == 1)) ++strong_errors;
    }
    const double strong_rate = static_cast<double>(strong_errors) / samples.size();
    for (const BoostRound& round : r.rounds) CHECK(strong_rate <= round.epsilon + 1e-12);
}

TEST_CASE("train_cascade with loose targets emits one perfect stage") {
    const auto pos = separable_samples(); // first two are positive
    std::vector<Sample> p(pos.begin(), pos.begin() + 2);
    std::vector<Sample> n(pos.begin() + 2, pos.end());
    for (Sample& s : n) s.label = 0;

    StageTargets targets;
    targets.d_min = 1.0;
    targets.f_max = 0.99;
    targets.max_stages = 1;
    const TrainedCascade tc = train_cascade(p, n, targets, edge_feature_only());
    REQUIRE(tc.cascade.stages.size() == 1);
    CHECK(tc.per_stage[0].d == 1.0);

    const CascadeRates rates = cascade_rates(tc.cascade, p, n);
    CHECK(rates.dr == 1.0);
}

TEST_CASE("design-point arithmetic for stage-rate products") {
    // 10 stages at (d, f) = (0.99, 0.5): DR ~ 0.904, FPR ~ 9.77e-4.
    CHECK(std::pow(0.99, 10) == doctest::Approx(0.9044).epsilon(1e-3));
    CHECK(std::pow(0.5, 10) == doctest::Approx(9.77e-4).epsilon(1e-3));
    // 25 stages at d = 0.998 give the ~95% whole-cascade design point.
    CHECK(std::pow(0.998, 25) == doctest::Approx(0.951).epsilon(1e-3));
}

TEST_CASE("cascade_rates on an accept-everything cascade") {
    Cascade c;
    Stage s;
    WeakClassifier wc;
    wc.feature.rect_count = 2;
    wc.feature.rects[0] = {{0, 0, 12, 24}, +1};
    wc.feature.rects[1] = {{12, 0, 12, 24}, -1};
    s.weak.push_back(wc);
    s.threshold = std::numeric_limits<std::int32_t>::min();
    c.stages.push_back(s);

    const auto samples = separable_samples();
    std::vector<Sample> p(samples.begin(), samples.begin() + 2);
    std::vector<Sample> n(samples.begin() + 2, samples.end());
    const CascadeRates r = cascade_rates(c, p, n);
    CHECK(r.dr == 1.0);
    CHECK(r.fpr == 1.0);
}

TEST_CASE("per-stage conditional rates multiply out to the whole-cascade rates") {
    Rng rng(107);
    std::vector<Sample> pos, neg;
    for (int i = 0; i < 40; ++i) pos.push_back(Sample::make(synth_face_window(rng), 1));
    for (int i = 0; i < 80; ++i) neg.push_back(Sample::make(synth_negative_window(rng), 0));

    StageTargets targets;
    targets.max_stages = 3;
    targets.d_min = 0.95;
    targets.f_max = 0.6;
    targets.max_weak_per_stage = 8;
    const auto features = enumerate_features(24, 24, 4, 4);
    const TrainedCascade tc = train_cascade(pos, neg, targets, features);

    const CascadeRates r = cascade_rates(tc.cascade, pos, neg);
    CHECK(r.dr_product == doctest::Approx(r.dr).epsilon(1e-12));
    CHECK(r.fpr_product == doctest::Approx(r.fpr).epsilon(1e-12));
}

TEST_CASE("training is deterministic") {
    Rng rng(109);
    std::vector<Sample> pos, neg;
    for (int i = 0; i < 30; ++i) pos.push_back(Sample::make(synth_face_window(rng), 1));
    for (int i = 0; i < 60; ++i) neg.push_back(Sample::make(synth_negative_window(rng), 0));
    StageTargets targets;
    targets.max_stages = 2;
    targets.max_weak_per_stage = 6;
    const auto features = enumerate_features(24, 24, 4, 4);
    const TrainedCascade a = train_cascade(pos, neg, targets, features);
    const TrainedCascade b = train_cascade(pos, neg, targets, features);
    CHECK(serialize_cascade(a.cascade) == serialize_cascade(b.cascade));
}
