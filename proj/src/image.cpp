#include "vj/image.hpp"

#include <cmath>
#include <string>

#include "vj/error.hpp"

namespace vj {

GrayImage::GrayImage(int w, int h, std::uint8_t fill)
    : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

bool GrayImage::valid() const {
    return width >= 1 && height >= 1 &&
           data.size() == static_cast<std::size_t>(width) * height;
}

std::uint64_t isqrt(std::uint64_t v) {
    if (v == 0) return 0;
    // Start from the float estimate and fix up; exact for all 64-bit inputs.
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(v)));
    while (r > 0 && r * r > v) --r;
    while ((r + 1) * (r + 1) <= v && (r + 1) != 0) ++r;
    return r;
}

IntegralPair compute_integrals(const GrayImage& img) {
    if (!img.valid()) throw ArgError("compute_integrals: invalid image");
    IntegralPair ip;
    ip.width = img.width;
    ip.height = img.height;
    ip.ii.resize(img.data.size());
    ip.sq_ii.resize(img.data.size());
    for (int y = 0; y < img.height; ++y) {
        std::uint64_t row = 0;
        std::uint64_t row_sq = 0;
        const std::size_t base = static_cast<std::size_t>(y) * img.width;
        const std::size_t above = base - img.width;
        for (int x = 0; x < img.width; ++x) {
            const std::uint64_t v = img.data[base + x];
            row += v;
            row_sq += v * v;
            ip.ii[base + x] = row + (y > 0 ? ip.ii[above + x] : 0);
            ip.sq_ii[base + x] = row_sq + (y > 0 ? ip.sq_ii[above + x] : 0);
        }
    }
    return ip;
}

std::uint64_t rect_sum(const IntegralPair& ip, const Rect& r, bool use_squared) {
    if (r.w < 1 || r.h < 1 || r.x < 0 || r.y < 0 || r.x + r.w > ip.width ||
        r.y + r.h > ip.height) {
        throw BoundsError("rect_sum: rectangle (" + std::to_string(r.x) + "," +
                          std::to_string(r.y) + "," + std::to_string(r.w) + "," +
                          std::to_string(r.h) + ") outside " + std::to_string(ip.width) +
                          "x" + std::to_string(ip.height) + " image");
    }
    const int x0 = r.x - 1, y0 = r.y - 1;
    const int x1 = r.x + r.w - 1, y1 = r.y + r.h - 1;
    if (use_squared) {
        return ip.squared_at(x1, y1) + ip.squared_at(x0, y0) - ip.squared_at(x1, y0) -
               ip.squared_at(x0, y1);
    }
    return ip.plain_at(x1, y1) + ip.plain_at(x0, y0) - ip.plain_at(x1, y0) -
           ip.plain_at(x0, y1);
}

std::uint64_t window_stddev(const IntegralPair& ip, int x, int y, int w, int h) {
    const Rect r{x, y, w, h};
    const std::uint64_t sum = rect_sum(ip, r, false);
    const std::uint64_t sq = rect_sum(ip, r, true);
    const std::uint64_t n = static_cast<std::uint64_t>(w) * h;
    const std::uint64_t lhs = n * sq;
    const std::uint64_t rhs = sum * sum;
    return lhs > rhs ? isqrt(lhs - rhs) : 0;
}

GrayImage downscale_nearest(const GrayImage& img, int out_w, int out_h) {
    if (!img.valid()) throw ArgError("downscale_nearest: invalid image");
    if (out_w < 1 || out_h < 1)
        throw ArgError("downscale_nearest: target dimensions must be >= 1");
    if (out_w > img.width || out_h > img.height)
        throw ArgError("downscale_nearest: target larger than source");
    GrayImage out(out_w, out_h);
    for (int j = 0; j < out_h; ++j) {
        const int sy = static_cast<int>(static_cast<std::int64_t>(j) * img.height / out_h);
        for (int i = 0; i < out_w; ++i) {
            const int sx = static_cast<int>(static_cast<std::int64_t>(i) * img.width / out_w);
            out.at(i, j) = img.at(sx, sy);
        }
    }
    return out;
}

std::vector<PyramidLevel> build_pyramid(const GrayImage& img, double scale_factor,
                                        int min_w, int min_h) {
    if (scale_factor <= 1.0) throw ArgError("build_pyramid: scale_factor must be > 1");
    if (min_w < 1 || min_h < 1) throw ArgError("build_pyramid: minimum dims must be >= 1");
    std::vector<PyramidLevel> levels;
    double scale = 1.0;
    for (;;) {
        const int w = static_cast<int>(img.width / scale);
        const int h = static_cast<int>(img.height / scale);
        if (w < min_w || h < min_h) break;
        PyramidLevel level;
        level.scale = scale;
        level.image = (w == img.width && h == img.height) ? img : downscale_nearest(img, w, h);
        levels.push_back(std::move(level));
        scale *= scale_factor;
    }
    return levels;
}

} // namespace vj
