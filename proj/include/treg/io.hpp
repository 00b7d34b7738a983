#pragma once

// 8-bit grayscale image I/O: PGM (P5 binary, P2 ascii) and PNG.  Loading
// normalizes to [0,1] by /255; saving clamps to [0,1], scales by 255 and
// rounds half up, so save-then-load is the identity on 8-bit data.

#include <png.h>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "treg/errors.hpp"
#include "treg/image.hpp"

namespace treg {

class IoError : public std::runtime_error {
  public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

inline std::uint8_t quantize_u8(double v) {
    v = std::min(1.0, std::max(0.0, v));
    return static_cast<std::uint8_t>(std::floor(v * 255.0 + 0.5));
}

namespace detail {

inline bool ends_with_ci(const std::string& s, const std::string& suffix) {
    if (s.size() < suffix.size()) return false;
    for (std::size_t k = 0; k < suffix.size(); ++k) {
        const char a = static_cast<char>(std::tolower(static_cast<unsigned char>(
            s[s.size() - suffix.size() + k])));
        if (a != suffix[k]) return false;
    }
    return true;
}

// PGM token reader that skips whitespace and '#' comments.
inline std::string pgm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
            continue;
        }
        if (!std::isspace(c)) {
            tok.push_back(static_cast<char>(c));
            while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#')
                tok.push_back(static_cast<char>(in.get()));
            return tok;
        }
    }
    throw IoError("pgm: unexpected end of header");
}

inline Image2D load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    const std::string magic = pgm_token(in);
    if (magic != "P5" && magic != "P2") throw IoError(path + ": not a P2/P5 PGM file");
    const std::size_t w = std::stoul(pgm_token(in));
    const std::size_t h = std::stoul(pgm_token(in));
    const unsigned long maxval = std::stoul(pgm_token(in));
    if (w == 0 || h == 0) throw IoError(path + ": empty image");
    if (maxval == 0 || maxval > 255) throw IoError(path + ": only 8-bit PGM supported");

    Image2D img(h, w);
    if (magic == "P5") {
        // Exactly one whitespace byte separates the header from the raster.
        const int sep = in.get();
        if (sep == EOF || !std::isspace(sep)) throw IoError(path + ": malformed P5 header");
        std::vector<std::uint8_t> row(w);
        for (std::size_t i = 0; i < h; ++i) {
            in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(w));
            if (!in) throw IoError(path + ": truncated raster");
            for (std::size_t j = 0; j < w; ++j)
                img(i, j) = static_cast<double>(row[j]) / static_cast<double>(maxval);
        }
    } else {
        for (std::size_t i = 0; i < h; ++i)
            for (std::size_t j = 0; j < w; ++j) {
                const unsigned long v = std::stoul(pgm_token(in));
                if (v > maxval) throw IoError(path + ": sample exceeds maxval");
                img(i, j) = static_cast<double>(v) / static_cast<double>(maxval);
            }
    }
    return img;
}

inline void save_pgm(const Image2D& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << "P5\n" << img.cols() << ' ' << img.rows() << "\n255\n";
    std::vector<std::uint8_t> row(img.cols());
    for (std::size_t i = 0; i < img.rows(); ++i) {
        for (std::size_t j = 0; j < img.cols(); ++j) row[j] = quantize_u8(img(i, j));
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw IoError("short write to " + path);
}

struct PngCloser {
    std::FILE* f = nullptr;
    ~PngCloser() {
        if (f) std::fclose(f);
    }
};

inline Image2D load_png(const std::string& path) {
    PngCloser fc;
    fc.f = std::fopen(path.c_str(), "rb");
    if (!fc.f) throw IoError("cannot open " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png: read struct allocation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("png: info struct allocation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError(path + ": png decode failed");
    }
    png_init_io(png, fc.f);
    png_read_info(png, info);

    // Normalize every variant to 8-bit grayscale.
    const png_byte color = png_get_color_type(png, info);
    if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA ||
        color == PNG_COLOR_TYPE_PALETTE)
        png_set_rgb_to_gray_fixed(png, 1, -1, -1);
    png_read_update_info(png, info);

    const std::size_t w = png_get_image_width(png, info);
    const std::size_t h = png_get_image_height(png, info);
    if (png_get_rowbytes(png, info) != w) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError(path + ": unexpected png row layout after conversion");
    }
    std::vector<std::uint8_t> raster(w * h);
    std::vector<png_bytep> rows(h);
    for (std::size_t i = 0; i < h; ++i) rows[i] = raster.data() + i * w;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    Image2D img(h, w);
    for (std::size_t k = 0; k < w * h; ++k) img[k] = static_cast<double>(raster[k]) / 255.0;
    return img;
}

inline void save_png(const Image2D& img, const std::string& path) {
    PngCloser fc;
    fc.f = std::fopen(path.c_str(), "wb");
    if (!fc.f) throw IoError("cannot write " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png: write struct allocation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png: info struct allocation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError(path + ": png encode failed");
    }
    png_init_io(png, fc.f);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.cols()),
                 static_cast<png_uint_32>(img.rows()), 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<std::uint8_t> row(img.cols());
    for (std::size_t i = 0; i < img.rows(); ++i) {
        for (std::size_t j = 0; j < img.cols(); ++j) row[j] = quantize_u8(img(i, j));
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace detail

// Format is chosen by extension: .png, .pgm (everything else is rejected).
inline Image2D load_image(const std::string& path) {
    if (detail::ends_with_ci(path, ".png")) return detail::load_png(path);
    if (detail::ends_with_ci(path, ".pgm")) return detail::load_pgm(path);
    throw IoError(path + ": unsupported image format (use .png or .pgm)");
}

inline void save_image(const Image2D& img, const std::string& path) {
    if (detail::ends_with_ci(path, ".png")) return detail::save_png(img, path);
    if (detail::ends_with_ci(path, ".pgm")) return detail::save_pgm(img, path);
    throw IoError(path + ": unsupported image format (use .png or .pgm)");
}

}  // namespace treg
