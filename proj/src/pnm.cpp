#include "vj/pnm.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "vj/error.hpp"

namespace vj {

namespace {

// Reads the next header token, skipping whitespace and '#' comment lines.
std::string next_token(std::istream& in) {
    std::string tok;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c)) {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    return tok;
}

int parse_header_int(std::istream& in, const char* field, const std::string& origin) {
    const std::string tok = next_token(in);
    if (tok.empty()) throw ParseError(origin + ": truncated header, missing " + field);
    try {
        std::size_t pos = 0;
        const int v = std::stoi(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ParseError(origin + ": bad " + field + " '" + tok + "'");
    }
}

} // namespace

GrayImage load_pnm(std::istream& in, const std::string& origin) {
    const std::string magic = next_token(in);
    if (magic != "P5" && magic != "P6")
        throw ParseError(origin + ": unsupported magic '" + magic + "' (want P5 or P6)");
    const bool color = magic == "P6";
    const int width = parse_header_int(in, "width", origin);
    const int height = parse_header_int(in, "height", origin);
    const int maxval = parse_header_int(in, "maxval", origin);
    if (width < 1 || height < 1)
        throw ParseError(origin + ": bad dimensions " + std::to_string(width) + "x" +
                         std::to_string(height));
    if (maxval != 255)
        throw ParseError(origin + ": maxval " + std::to_string(maxval) + " unsupported (want 255)");
    // Exactly one whitespace byte separates the header from the payload.

    const std::size_t pixels = static_cast<std::size_t>(width) * height;
    const std::size_t payload = pixels * (color ? 3 : 1);
    std::vector<char> raw(payload);
    in.read(raw.data(), static_cast<std::streamsize>(payload));
    if (static_cast<std::size_t>(in.gcount()) != payload)
        throw ParseError(origin + ": truncated payload (" + std::to_string(in.gcount()) +
                         " of " + std::to_string(payload) + " bytes)");

    GrayImage img(width, height);
    if (!color) {
        for (std::size_t i = 0; i < pixels; ++i)
            img.data[i] = static_cast<std::uint8_t>(raw[i]);
    } else {
        for (std::size_t i = 0; i < pixels; ++i) {
            const int r = static_cast<std::uint8_t>(raw[3 * i]);
            const int g = static_cast<std::uint8_t>(raw[3 * i + 1]);
            const int b = static_cast<std::uint8_t>(raw[3 * i + 2]);
            // Integer Rec.601 luma, rounded.
            const int y = (299 * r + 587 * g + 114 * b + 500) / 1000;
            img.data[i] = static_cast<std::uint8_t>(y > 255 ? 255 : y);
        }
    }
    return img;
}

GrayImage load_pnm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    return load_pnm(in, path);
}

void save_pgm(const GrayImage& img, const std::string& path) {
    if (!img.valid()) throw ArgError("save_pgm: invalid image");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data.data()),
              static_cast<std::streamsize>(img.data.size()));
    if (!out) throw IoError("short write to '" + path + "'");
}

void save_ppm_annotated(const GrayImage& img, const std::vector<Rect>& boxes,
                        const std::string& path) {
    if (!img.valid()) throw ArgError("save_ppm_annotated: invalid image");
    std::vector<std::uint8_t> rgb(img.data.size() * 3);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        rgb[3 * i] = rgb[3 * i + 1] = rgb[3 * i + 2] = img.data[i];
    }
    auto mark = [&](int x, int y) {
        if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
        const std::size_t i = (static_cast<std::size_t>(y) * img.width + x) * 3;
        rgb[i] = rgb[i + 1] = rgb[i + 2] = 255;
    };
    for (const Rect& b : boxes) {
        for (int x = b.x; x < b.x + b.w; ++x) {
            mark(x, b.y);
            mark(x, b.y + b.h - 1);
        }
        for (int y = b.y; y < b.y + b.h; ++y) {
            mark(b.x, y);
            mark(b.x + b.w - 1, y);
        }
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(rgb.data()),
              static_cast<std::streamsize>(rgb.size()));
    if (!out) throw IoError("short write to '" + path + "'");
}

} // namespace vj
