#pragma once

#include <cstdint>
#include <vector>

namespace vj {

/// 8-bit grayscale image, row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data; // width*height bytes

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0);

    std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    bool valid() const;
};

struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;
};

/// Plain and squared integral images of a GrayImage. Tables are inclusive:
/// ii(x,y) is the sum of all pixels with x' <= x and y' <= y, so ii at the
/// bottom-right corner is the sum of the whole image ("integral value").
/// Out-of-range corner lookups (x or y == -1) read as zero.
struct IntegralPair {
    int width = 0;
    int height = 0;
    std::vector<std::uint64_t> ii;
    std::vector<std::uint64_t> sq_ii;

    std::uint64_t plain_at(int x, int y) const {
        return (x < 0 || y < 0) ? 0 : ii[static_cast<std::size_t>(y) * width + x];
    }
    std::uint64_t squared_at(int x, int y) const {
        return (x < 0 || y < 0) ? 0 : sq_ii[static_cast<std::size_t>(y) * width + x];
    }
    /// Sum of all pixels, i.e. the bottom-right entry of the plain table.
    std::uint64_t integral_value() const { return plain_at(width - 1, height - 1); }
};

/// One level of the detection pyramid. `scale` is the ratio between original
/// and level coordinates (scale_factor^k, level 0 has scale 1).
struct PyramidLevel {
    GrayImage image;
    double scale = 1.0;
};

/// Floor integer square root.
std::uint64_t isqrt(std::uint64_t v);

/// Builds both integral tables in one pass (running row sums).
IntegralPair compute_integrals(const GrayImage& img);

/// Sum of pixels (or squared pixels) inside `r` via four table lookups.
/// Throws BoundsError when the rectangle does not fit the image.
std::uint64_t rect_sum(const IntegralPair& ip, const Rect& r, bool use_squared = false);

/// sigma*N for the w x h window at (x,y): floor(sqrt(max(0, N*Sum(x^2) - Sum(x)^2)))
/// where N = w*h. This is N times the population standard deviation, kept
/// unscaled so threshold comparisons can multiply instead of divide.
std::uint64_t window_stddev(const IntegralPair& ip, int x, int y, int w, int h);

/// Nearest-neighbor downscale; output pixel (i,j) samples source pixel
/// (i*width/out_w, j*height/out_h) with integer division.
GrayImage downscale_nearest(const GrayImage& img, int out_w, int out_h);

/// Pyramid of successively downscaled copies. Level k has dimensions
/// floor(width/scale_factor^k) x floor(height/scale_factor^k); generation
/// stops before the first level where either dimension drops below its
/// minimum. An image smaller than (min_w, min_h) yields an empty pyramid.
std::vector<PyramidLevel> build_pyramid(const GrayImage& img, double scale_factor,
                                        int min_w, int min_h);

} // namespace vj
