#pragma once

#include <iosfwd>
#include <string>

#include "vj/image.hpp"

namespace vj {

/// Loads a binary PGM (P5) or PPM (P6) file, maxval 255. P6 pixels are
/// converted with integer Rec.601 luminance round(0.299R + 0.587G + 0.114B).
/// `#` comment lines are allowed between header tokens. Anything else is a
/// ParseError naming the offending header field.
GrayImage load_pnm(const std::string& path);
GrayImage load_pnm(std::istream& in, const std::string& origin = "<stream>");

/// Writes a binary PGM (P5), maxval 255.
void save_pgm(const GrayImage& img, const std::string& path);

/// Writes a binary PPM (P6) of the image with 1-pixel white (255) outlines
/// around each box. Boxes are clipped to the image.
void save_ppm_annotated(const GrayImage& img, const std::vector<Rect>& boxes,
                        const std::string& path);

} // namespace vj
