#include "vj/features.hpp"

#include "vj/error.hpp"

namespace vj {

namespace {

HaarFeature two_rect(Rect a, int wa, Rect b, int wb) {
    HaarFeature f;
    f.rects[0] = {a, wa};
    f.rects[1] = {b, wb};
    f.rect_count = 2;
    return f;
}

HaarFeature three_rect(Rect a, int wa, Rect b, int wb, Rect c, int wc) {
    HaarFeature f;
    f.rects[0] = {a, wa};
    f.rects[1] = {b, wb};
    f.rects[2] = {c, wc};
    f.rect_count = 3;
    return f;
}

} // namespace

std::vector<HaarFeature> enumerate_features(int window_w, int window_h, int stride,
                                            int size_step) {
    if (stride < 1 || size_step < 1)
        throw ArgError("enumerate_features: stride and size_step must be >= 1");
    std::vector<HaarFeature> out;

    // Template extents are multiples (kx, ky) of the unit cell (w, h).
    auto emit_positions = [&](int kx, int ky, auto&& make) {
        for (int w = 1; w * kx <= window_w; w += size_step) {
            for (int h = 1; h * ky <= window_h; h += size_step) {
                for (int x = 0; x + kx * w <= window_w; x += stride) {
                    for (int y = 0; y + ky * h <= window_h; y += stride) {
                        out.push_back(make(x, y, w, h));
                    }
                }
            }
        }
    };

    // Horizontal edge: left cell minus right cell.
    emit_positions(2, 1, [](int x, int y, int w, int h) {
        return two_rect({x, y, w, h}, +1, {x + w, y, w, h}, -1);
    });
    // Vertical edge: top cell minus bottom cell.
    emit_positions(1, 2, [](int x, int y, int w, int h) {
        return two_rect({x, y, w, h}, +1, {x, y + h, w, h}, -1);
    });
    // Horizontal line: outer thirds minus middle, encoded as the whole span
    // plus a -3 weighted middle cell (L + M + R - 3M = L + R - 2M).
    emit_positions(3, 1, [](int x, int y, int w, int h) {
        return two_rect({x, y, 3 * w, h}, +1, {x + w, y, w, h}, -3);
    });
    // Vertical line.
    emit_positions(1, 3, [](int x, int y, int w, int h) {
        return two_rect({x, y, w, 3 * h}, +1, {x, y + h, w, h}, -3);
    });
    // Four-rectangle checkerboard: whole block minus twice the main diagonal
    // cells (TR + BL - TL - BR).
    emit_positions(2, 2, [](int x, int y, int w, int h) {
        return three_rect({x, y, 2 * w, 2 * h}, +1, {x, y, w, h}, -2,
                          {x + w, y + h, w, h}, -2);
    });

    return out;
}

} // namespace vj
