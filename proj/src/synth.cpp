#include "vj/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "vj/error.hpp"
#include "vj/pnm.hpp"

namespace vj {

std::uint64_t Rng::next() {
    // splitmix64
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::uint32_t Rng::below(std::uint32_t n) {
    // Lemire's bounded generation, bias negligible for our ranges.
    return static_cast<std::uint32_t>(
        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(next())) * n) >> 32);
}

int Rng::range(int lo, int hi) {
    return lo + static_cast<int>(below(static_cast<std::uint32_t>(hi - lo + 1)));
}

double Rng::real() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

namespace {

std::uint8_t clamp_px(int v) { return static_cast<std::uint8_t>(std::clamp(v, 0, 255)); }

void fill_rect(GrayImage& img, int x0, int y0, int w, int h, int value) {
    for (int y = y0; y < y0 + h; ++y)
        for (int x = x0; x < x0 + w; ++x)
            if (x >= 0 && y >= 0 && x < img.width && y < img.height)
                img.at(x, y) = clamp_px(value);
}

// 24x24 face in flat blocks (two dark eyes, bright nose bridge and cheeks,
// dark mouth) so nearest-neighbor rescaling keeps the structure. Geometry
// and contrasts vary substantially between samples; only the ordering of
// the block intensities is stable, so no single contrast separates faces
// from the near-miss negatives below.
GrayImage face_template(Rng& rng) {
    const int skin = rng.range(120, 200);
    const int eye = skin - rng.range(60, 105);      // clearly darker than skin
    const int bridge = skin + rng.range(15, 45);    // clearly brighter
    const int cheek = skin + rng.range(5, 30);
    const int mouth = skin - rng.range(40, 85);

    const int jx = rng.range(-1, 1);
    const int jy = rng.range(-1, 1);
    const int eye_w = rng.range(5, 7);
    const int eye_h = rng.range(4, 6);
    const int eye_y = 5 + jy;
    const int left_x = 3 + jx;
    const int right_x = 23 - left_x - eye_w; // mirrored
    const int mouth_w = rng.range(10, 14);
    const int mouth_x = 12 - mouth_w / 2 + jx;

    GrayImage f(24, 24, clamp_px(skin));
    fill_rect(f, left_x, eye_y, eye_w, eye_h, eye);
    fill_rect(f, right_x, eye_y, eye_w, eye_h, eye);
    fill_rect(f, left_x + eye_w, eye_y - 1, right_x - left_x - eye_w, eye_h + 2, bridge);
    fill_rect(f, 2, eye_y + eye_h + 1, 20, 5, cheek);
    fill_rect(f, 10 + jx, eye_y + eye_h + 1, 4, 4, bridge); // nose tip
    fill_rect(f, mouth_x, 17 + jy, mouth_w, 4, mouth);
    return f;
}

void add_noise(GrayImage& img, Rng& rng, int amplitude) {
    for (auto& px : img.data)
        px = clamp_px(static_cast<int>(px) + rng.range(-amplitude, amplitude));
}

void apply_gain(GrayImage& img, Rng& rng) {
    const double gain = 0.85 + 0.3 * rng.real();
    const int offset = rng.range(-25, 25);
    for (auto& px : img.data)
        px = clamp_px(static_cast<int>(px * gain) + offset);
}

GrayImage resize_nearest_any(const GrayImage& src, int out_w, int out_h) {
    GrayImage out(out_w, out_h);
    for (int j = 0; j < out_h; ++j) {
        const int sy = static_cast<int>(static_cast<std::int64_t>(j) * src.height / out_h);
        for (int i = 0; i < out_w; ++i) {
            const int sx = static_cast<int>(static_cast<std::int64_t>(i) * src.width / out_w);
            out.at(i, j) = src.at(sx, sy);
        }
    }
    return out;
}

void paste(GrayImage& dst, const GrayImage& src, int x0, int y0) {
    for (int y = 0; y < src.height; ++y)
        for (int x = 0; x < src.width; ++x)
            if (x0 + x < dst.width && y0 + y < dst.height) dst.at(x0 + x, y0 + y) = src.at(x, y);
}

} // namespace

GrayImage synth_face_window(Rng& rng) {
    GrayImage f = face_template(rng);
    apply_gain(f, rng);
    add_noise(f, rng, 10);
    return f;
}

namespace {

// Near-miss negative: a genuine face template with one attribute corrupted
// (an eye brightened, bands swapped, the pattern flipped, ...). Each
// corruption leaves most face contrasts intact, so single weak classifiers
// cannot reject them all and cascades grow real stages.
GrayImage corrupted_face(Rng& rng) {
    GrayImage f = face_template(rng);
    switch (rng.below(5)) {
        case 0: { // brighten one eye
            const bool left = rng.below(2) == 0;
            fill_rect(f, left ? 3 : 15, 5, 6, 5, rng.range(190, 245));
            break;
        }
        case 1: { // dark nose bridge (eyes merge into one band)
            fill_rect(f, 8, 5, 8, 6, rng.range(30, 70));
            break;
        }
        case 2: { // mouth band brighter than skin
            fill_rect(f, 6, 17, 12, 5, rng.range(200, 250));
            break;
        }
        case 3: { // vertical flip: mouth above, eyes below
            GrayImage g(24, 24);
            for (int y = 0; y < 24; ++y)
                for (int x = 0; x < 24; ++x) g.at(x, y) = f.at(x, 23 - y);
            f = g;
            break;
        }
        default: { // dark cheek band
            fill_rect(f, 2, 11, 20, 5, rng.range(30, 80));
            break;
        }
    }
    return f;
}

// Face-shaped geometry with fully independent block intensities.
GrayImage scrambled_face(Rng& rng) {
    const int skin = rng.range(40, 215);
    GrayImage f(24, 24, clamp_px(skin));
    const int jx = rng.range(-1, 1);
    fill_rect(f, 3 + jx, 6, 7, 5, rng.range(30, 225));
    fill_rect(f, 14 + jx, 6, 7, 5, rng.range(30, 225));
    fill_rect(f, 10 + jx, 5, 4, 7, rng.range(30, 225));
    fill_rect(f, 2, 11, 20, 5, rng.range(30, 225));
    fill_rect(f, 10 + jx, 11, 4, 4, rng.range(30, 225));
    fill_rect(f, 6 + jx, 17, 12, 4, rng.range(30, 225));
    return f;
}

} // namespace

GrayImage synth_negative_window(Rng& rng) {
    GrayImage n(24, 24);
    switch (rng.below(6)) {
        case 0: // pure noise
            for (auto& px : n.data) px = static_cast<std::uint8_t>(rng.below(256));
            break;
        case 1: { // noisy flat patch
            const int base = rng.range(20, 235);
            for (auto& px : n.data) px = clamp_px(base + rng.range(-20, 20));
            break;
        }
        case 2: { // linear gradient
            const int a = rng.range(0, 255), b = rng.range(0, 255);
            const bool horiz = rng.below(2) == 0;
            for (int y = 0; y < 24; ++y)
                for (int x = 0; x < 24; ++x) {
                    const int t = horiz ? x : y;
                    n.at(x, y) = clamp_px(a + (b - a) * t / 23);
                }
            add_noise(n, rng, 8);
            break;
        }
        case 3: { // random rectangles on a random background
            const int base = rng.range(40, 215);
            for (auto& px : n.data) px = clamp_px(base + rng.range(-10, 10));
            const int blobs = rng.range(2, 5);
            for (int i = 0; i < blobs; ++i) {
                const int w = rng.range(3, 14), h = rng.range(3, 14);
                fill_rect(n, rng.range(0, 23 - 3), rng.range(0, 23 - 3), w, h,
                          rng.range(0, 255));
            }
            break;
        }
        case 4: // face geometry, scrambled block intensities
            n = scrambled_face(rng);
            add_noise(n, rng, 10);
            break;
        default: // near-miss corrupted faces
            n = corrupted_face(rng);
            apply_gain(n, rng);
            add_noise(n, rng, 10);
            break;
    }
    return n;
}

GrayImage synth_scene(Rng& rng, int width, int height, int n_faces, std::vector<Box>& truth) {
    if (width < 48 || height < 48) throw ArgError("synth_scene: scene too small");
    GrayImage scene(width, height);

    // Structured background: soft diagonal gradient with clutter rectangles.
    const int a = rng.range(60, 120), b = rng.range(140, 210);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            scene.at(x, y) = clamp_px(a + (b - a) * (x + y) / (width + height - 2));
    const int clutter = rng.range(6, 14);
    for (int i = 0; i < clutter; ++i) {
        const int w = rng.range(8, width / 4), h = rng.range(8, height / 4);
        fill_rect(scene, rng.range(0, width - 8), rng.range(0, height - 8), w, h,
                  rng.range(30, 225));
    }
    // A few scrambled face-shaped distractors keep the scan honest.
    const int distractors = rng.range(2, 5);
    for (int i = 0; i < distractors; ++i) {
        GrayImage d = scrambled_face(rng);
        const int size = rng.range(24, std::min(64, std::min(width, height) - 4));
        if (size != 24) d = resize_nearest_any(d, size, size);
        paste(scene, d, rng.range(0, width - size), rng.range(0, height - size));
    }
    add_noise(scene, rng, 6);

    // Face sizes follow the detector's scale ladder so boxes line up with
    // pyramid levels.
    static constexpr int kSizes[] = {24, 29, 35, 41, 50, 60};
    for (int f = 0; f < n_faces; ++f) {
        for (int attempt = 0; attempt < 200; ++attempt) {
            const int size = kSizes[rng.below(std::min<std::uint32_t>(
                6, static_cast<std::uint32_t>(std::min(width, height) / 24)))];
            if (size > std::min(width, height) - 4) continue;
            Box box;
            box.w = box.h = size;
            box.x = rng.range(2, width - size - 2);
            box.y = rng.range(2, height - size - 2);
            // Keep faces well apart so grouping cannot merge two of them.
            bool clear = true;
            for (const Box& other : truth) {
                const int gap = 12;
                if (box.x < other.x + other.w + gap && other.x < box.x + box.w + gap &&
                    box.y < other.y + other.h + gap && other.y < box.y + box.h + gap) {
                    clear = false;
                    break;
                }
            }
            if (!clear) continue;
            GrayImage face = face_template(rng);
            apply_gain(face, rng);
            GrayImage scaled = size == 24 ? face : resize_nearest_any(face, size, size);
            add_noise(scaled, rng, 6);
            paste(scene, scaled, box.x, box.y);
            truth.push_back(box);
            break;
        }
    }
    return scene;
}

Corpus make_corpus(const CorpusSpec& spec) {
    Corpus c;
    Rng rng(spec.seed);
    c.pos.reserve(spec.n_pos);
    for (int i = 0; i < spec.n_pos; ++i) c.pos.push_back(synth_face_window(rng));
    c.neg.reserve(spec.n_neg);
    for (int i = 0; i < spec.n_neg; ++i) c.neg.push_back(synth_negative_window(rng));
    for (int i = 0; i < spec.n_scenes; ++i) {
        std::vector<Box> truth;
        const int faces = spec.min_faces_per_scene +
                          static_cast<int>(rng.below(static_cast<std::uint32_t>(
                              spec.max_faces_per_scene - spec.min_faces_per_scene + 1)));
        c.scenes.push_back(synth_scene(rng, spec.scene_w, spec.scene_h, faces, truth));
        c.scene_truth.push_back(std::move(truth));
    }
    return c;
}

void write_corpus(const Corpus& corpus, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(dir) / "pos");
    fs::create_directories(fs::path(dir) / "neg");
    fs::create_directories(fs::path(dir) / "scenes");

    auto name = [](const char* prefix, std::size_t i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%s_%04zu.pgm", prefix, i);
        return std::string(buf);
    };

    for (std::size_t i = 0; i < corpus.pos.size(); ++i)
        save_pgm(corpus.pos[i], (fs::path(dir) / "pos" / name("pos", i)).string());
    for (std::size_t i = 0; i < corpus.neg.size(); ++i)
        save_pgm(corpus.neg[i], (fs::path(dir) / "neg" / name("neg", i)).string());

    std::vector<ManifestEntry> manifest;
    for (std::size_t i = 0; i < corpus.scenes.size(); ++i) {
        const std::string file = name("scene", i);
        save_pgm(corpus.scenes[i], (fs::path(dir) / "scenes" / file).string());
        ManifestEntry e;
        e.path = "scenes/" + file;
        e.faces = corpus.scene_truth[i];
        manifest.push_back(std::move(e));
    }
    // Entries are relative to the corpus root, where the manifest lives.
    std::ofstream out(fs::path(dir) / "manifest.txt");
    if (!out) throw IoError("cannot write manifest under '" + dir + "'");
    out << serialize_manifest(manifest);
}

} // namespace vj
