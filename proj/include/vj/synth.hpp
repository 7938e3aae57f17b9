#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vj/evalmetrics.hpp"
#include "vj/image.hpp"

namespace vj {

/// Small deterministic generator (splitmix64 core). Used instead of
/// std::uniform_*_distribution so that corpora and golden files are
/// bit-identical across standard libraries.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed = 0x9e3779b97f4a7c15ull) : state(seed) {}

    std::uint64_t next();
    /// Uniform in [0, n), n >= 1.
    std::uint32_t below(std::uint32_t n);
    /// Uniform in [lo, hi] inclusive.
    int range(int lo, int hi);
    /// Uniform in [0, 1).
    double real();
};

/// Synthetic 24x24 face-like window: dark eye blocks, bright cheek band and
/// a dark mouth band over a mid background, with per-sample brightness,
/// contrast and pixel noise jitter.
GrayImage synth_face_window(Rng& rng);

/// Synthetic 24x24 non-face window: flat noise, gradients or random blobs.
GrayImage synth_negative_window(Rng& rng);

/// Scene with n_faces synthetic faces of varying sizes pasted onto a
/// structured background. Face boxes (original coordinates) are appended to
/// `truth`; faces never overlap each other.
GrayImage synth_scene(Rng& rng, int width, int height, int n_faces,
                      std::vector<Box>& truth);

struct CorpusSpec {
    std::uint64_t seed = 1;
    int n_pos = 200;
    int n_neg = 500;
    int n_scenes = 20;
    int scene_w = 480;
    int scene_h = 360;
    int min_faces_per_scene = 1;
    int max_faces_per_scene = 3;
};

/// In-memory corpus of labelled windows plus annotated scenes.
struct Corpus {
    std::vector<GrayImage> pos;
    std::vector<GrayImage> neg;
    std::vector<GrayImage> scenes;
    std::vector<std::vector<Box>> scene_truth;
};

Corpus make_corpus(const CorpusSpec& spec);

/// Writes pos/, neg/ and scenes/ directories of PGM files plus a
/// scenes/manifest.txt ground-truth manifest under `dir`.
void write_corpus(const Corpus& corpus, const std::string& dir);

} // namespace vj
