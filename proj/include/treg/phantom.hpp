#pragma once

// Synthetic test images.  The modified Shepp-Logan phantom follows the
// standard ten-ellipse table on [-1,1]^2 (intensities already in [0,1]).
// "qrcode" and "satellite" are deterministic stand-ins with comparable
// structure (binary blocks with finder squares; dark sky with a bright
// panelled body), since the originals are not redistributable.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "treg/errors.hpp"
#include "treg/image.hpp"

namespace treg {

struct PhantomEllipse {
    double value;   // additive intensity
    double a, b;    // semi-axes
    double x0, y0;  // center
    double phi;     // rotation, degrees
};

// Modified (contrast-improved) Shepp-Logan ellipse table.
inline const std::array<PhantomEllipse, 10>& shepp_logan_ellipses() {
    static const std::array<PhantomEllipse, 10> e = {{
        {1.0, 0.6900, 0.9200, 0.0, 0.0, 0.0},
        {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
        {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
        {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
        {0.1, 0.2100, 0.2500, 0.0, 0.3500, 0.0},
        {0.1, 0.0460, 0.0460, 0.0, 0.1000, 0.0},
        {0.1, 0.0460, 0.0460, 0.0, -0.1000, 0.0},
        {0.1, 0.0460, 0.0230, -0.08, -0.6050, 0.0},
        {0.1, 0.0230, 0.0230, 0.0, -0.6060, 0.0},
        {0.1, 0.0230, 0.0460, 0.06, -0.6050, 0.0},
    }};
    return e;
}

// size x size phantom sampled at pixel centers; row 0 is the top of the
// head (y = +1).
inline Image2D shepp_logan(std::size_t size) {
    if (size < 2) throw ConfigError("shepp_logan: size too small");
    Image2D img(size, size);
    const double half = static_cast<double>(size) / 2.0;
    for (std::size_t i = 0; i < size; ++i) {
        const double y = (static_cast<double>(size - 1 - i) + 0.5 - half) / half;
        for (std::size_t j = 0; j < size; ++j) {
            const double x = (static_cast<double>(j) + 0.5 - half) / half;
            double v = 0.0;
            for (const PhantomEllipse& e : shepp_logan_ellipses()) {
                const double rad = e.phi * M_PI / 180.0;
                const double c = std::cos(rad), s = std::sin(rad);
                const double xr = (x - e.x0) * c + (y - e.y0) * s;
                const double yr = -(x - e.x0) * s + (y - e.y0) * c;
                if ((xr * xr) / (e.a * e.a) + (yr * yr) / (e.b * e.b) <= 1.0) v += e.value;
            }
            img(i, j) = std::min(1.0, std::max(0.0, v));
        }
    }
    return img;
}

// Binary block pattern in the spirit of a QR code: fixed-seed random
// modules plus three finder squares, quiet border.  Values are exactly 0/1.
inline Image2D qrcode_phantom(std::size_t size) {
    if (size < 32) throw ConfigError("qrcode_phantom: size too small");
    const std::size_t modules = 29;               // pattern grid incl. quiet zone
    const std::size_t cell = size / modules;      // pixels per module
    Image2D img(size, size, 1.0);                 // white background

    std::mt19937_64 rng(0x9d2c5680u);             // fixed pattern, not configurable
    std::vector<std::uint8_t> grid(modules * modules, 0);
    for (std::size_t r = 2; r + 2 < modules; ++r)
        for (std::size_t c = 2; c + 2 < modules; ++c)
            grid[r * modules + c] = static_cast<std::uint8_t>(rng() & 1u);

    // Finder squares (7x7 with white inset and black core), top-left,
    // top-right, bottom-left.
    const auto stamp_finder = [&](std::size_t r0, std::size_t c0) {
        for (std::size_t r = 0; r < 7; ++r)
            for (std::size_t c = 0; c < 7; ++c) {
                const bool ring = (r == 0 || r == 6 || c == 0 || c == 6);
                const bool core = (r >= 2 && r <= 4 && c >= 2 && c <= 4);
                grid[(r0 + r) * modules + (c0 + c)] = (ring || core) ? 1 : 0;
            }
    };
    stamp_finder(2, 2);
    stamp_finder(2, modules - 9);
    stamp_finder(modules - 9, 2);

    const std::size_t used = cell * modules;
    const std::size_t off = (size - used) / 2;
    for (std::size_t r = 0; r < modules; ++r)
        for (std::size_t c = 0; c < modules; ++c) {
            if (!grid[r * modules + c]) continue;
            for (std::size_t i = 0; i < cell; ++i)
                for (std::size_t j = 0; j < cell; ++j)
                    img(off + r * cell + i, off + c * cell + j) = 0.0;
        }
    return img;
}

// Satellite-like scene: near-black sky with a few dim stars, a bright
// rotated body with two panel wings, mast and antenna dish.  Piecewise
// constant with sharp edges at several orientations.
inline Image2D satellite_phantom(std::size_t size) {
    if (size < 32) throw ConfigError("satellite_phantom: size too small");
    Image2D img(size, size, 0.02);  // sky
    const double half = static_cast<double>(size) / 2.0;

    // A handful of fixed stars.
    std::mt19937_64 rng(0x106689d4u);
    std::uniform_real_distribution<double> pos(-0.95, 0.95);
    for (int k = 0; k < 24; ++k) {
        const double sx = pos(rng), sy = pos(rng);
        const double val = 0.35 + 0.4 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const std::size_t ci = static_cast<std::size_t>((1.0 - sy) * half);
        const std::size_t cj = static_cast<std::size_t>((1.0 + sx) * half);
        if (ci + 1 < size && cj + 1 < size)
            for (std::size_t di = 0; di < 2; ++di)
                for (std::size_t dj = 0; dj < 2; ++dj) img(ci + di, cj + dj) = val;
    }

    const double rot = 25.0 * M_PI / 180.0;
    const double cr = std::cos(rot), sr = std::sin(rot);
    const auto body_frame = [&](double x, double y, double& bx, double& by) {
        bx = x * cr + y * sr;
        by = -x * sr + y * cr;
    };
    const auto in_rect = [](double x, double y, double cx, double cy, double hw, double hh) {
        return std::fabs(x - cx) <= hw && std::fabs(y - cy) <= hh;
    };

    for (std::size_t i = 0; i < size; ++i) {
        const double y = (static_cast<double>(size - 1 - i) + 0.5 - half) / half;
        for (std::size_t j = 0; j < size; ++j) {
            const double x = (static_cast<double>(j) + 0.5 - half) / half;
            double bx, by;
            body_frame(x, y, bx, by);
            double v = -1.0;
            // Central bus.
            if (in_rect(bx, by, 0.0, 0.0, 0.16, 0.22)) v = 0.85;
            // Panel wings with cell strips of alternating brightness.
            if (in_rect(bx, by, -0.52, 0.0, 0.33, 0.13) || in_rect(bx, by, 0.52, 0.0, 0.33, 0.13)) {
                const int strip = static_cast<int>(std::floor((bx + 2.0) / 0.11));
                v = (strip % 2 == 0) ? 0.55 : 0.70;
            }
            // Mast up to the dish.
            if (in_rect(bx, by, 0.0, 0.33, 0.025, 0.12)) v = 0.75;
            // Dish: annulus cap above the mast.
            const double dx = bx, dy = by - 0.55;
            const double rr = dx * dx + dy * dy;
            if (rr <= 0.12 * 0.12 && by > 0.45) v = 0.95;
            if (rr <= 0.045 * 0.045) v = 0.60;
            if (v >= 0.0) img(i, j) = v;
        }
    }
    return img;
}

// Name-dispatched generator used by the CLI.
inline Image2D make_phantom(const std::string& name, std::size_t size) {
    if (name == "shepp-logan" || name == "shepp_logan") return shepp_logan(size);
    if (name == "qrcode") return qrcode_phantom(size);
    if (name == "satellite") return satellite_phantom(size);
    throw ConfigError("make_phantom: unknown phantom '" + name +
                      "' (expected shepp-logan, qrcode, or satellite)");
}

}  // namespace treg
