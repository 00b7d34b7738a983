#pragma once

// Discrete operators on the periodic grid: forward-difference gradient and
// its adjoint, circular convolution with a centered kernel, and Gaussian
// kernel construction.
//
// Conventions (used consistently by the FFT solver and the energy):
//   (grad u).x(i,j) = u(i, j+1) - u(i, j)   horizontal, wraps at j = n-1
//   (grad u).y(i,j) = u(i+1, j) - u(i, j)   vertical,   wraps at i = m-1
//   grad_adjoint = grad^T (negative discrete divergence), so that
//   <grad u, p> = <u, grad_adjoint p> exactly.

#include <cmath>
#include <cstddef>
#include <vector>

#include "treg/errors.hpp"
#include "treg/image.hpp"

namespace treg {

inline void grad(const Image2D& u, DualField& g) {
    const std::size_t m = u.rows(), n = u.cols();
    if (g.rows() != m || g.cols() != n) g = DualField(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t ip = (i + 1 == m) ? 0 : i + 1;
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t jp = (j + 1 == n) ? 0 : j + 1;
            g.x(i, j) = u(i, jp) - u(i, j);
            g.y(i, j) = u(ip, j) - u(i, j);
        }
    }
}

inline DualField grad(const Image2D& u) {
    DualField g(u.rows(), u.cols());
    grad(u, g);
    return g;
}

inline void grad_adjoint(const DualField& p, Image2D& out) {
    const std::size_t m = p.rows(), n = p.cols();
    if (out.rows() != m || out.cols() != n) out = Image2D(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t im = (i == 0) ? m - 1 : i - 1;
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t jm = (j == 0) ? n - 1 : j - 1;
            out(i, j) = (p.x(i, jm) - p.x(i, j)) + (p.y(im, j) - p.y(i, j));
        }
    }
}

inline Image2D grad_adjoint(const DualField& p) {
    Image2D out(p.rows(), p.cols());
    grad_adjoint(p, out);
    return out;
}

// Centered odd-sized convolution kernel.  Entry (r, c) with r, c in
// [-(size-1)/2, (size-1)/2] is stored at k[(r+h)*size + (c+h)], h the
// half-width.
struct BlurKernel {
    std::size_t size = 1;       // odd
    std::vector<double> k{1.0};

    std::size_t half() const { return size / 2; }
    double at(std::ptrdiff_t r, std::ptrdiff_t c) const {
        const std::ptrdiff_t h = static_cast<std::ptrdiff_t>(half());
        return k[static_cast<std::size_t>((r + h) * static_cast<std::ptrdiff_t>(size) + (c + h))];
    }
    double sum() const {
        double s = 0.0;
        for (double v : k) s += v;
        return s;
    }
    static BlurKernel identity() { return BlurKernel{}; }
};

// Normalized Gaussian, truncated to size x size (size odd), weights
// exp(-(r^2+c^2)/(2 sigma^2)) rescaled to sum to 1.
inline BlurKernel gaussian_kernel(std::size_t size, double sigma) {
    if (size == 0 || size % 2 == 0) throw ConfigError("gaussian_kernel: size must be odd");
    if (!(sigma > 0.0)) throw ConfigError("gaussian_kernel: sigma must be positive");
    BlurKernel ker;
    ker.size = size;
    ker.k.assign(size * size, 0.0);
    const std::ptrdiff_t h = static_cast<std::ptrdiff_t>(size / 2);
    double s = 0.0;
    for (std::ptrdiff_t r = -h; r <= h; ++r)
        for (std::ptrdiff_t c = -h; c <= h; ++c) {
            const double w = std::exp(-(double(r * r + c * c)) / (2.0 * sigma * sigma));
            ker.k[static_cast<std::size_t>((r + h) * static_cast<std::ptrdiff_t>(size) + (c + h))] = w;
            s += w;
        }
    for (double& v : ker.k) v /= s;
    return ker;
}

// y(i,j) = sum_{r,c} k(r,c) u(i-r, j-c), indices wrapped periodically.
inline void convolve(const Image2D& u, const BlurKernel& ker, Image2D& out) {
    const std::size_t m = u.rows(), n = u.cols();
    if (ker.size > m || ker.size > n)
        throw ConfigError("convolve: kernel larger than image");
    if (out.rows() != m || out.cols() != n) out = Image2D(m, n);
    const std::ptrdiff_t h = static_cast<std::ptrdiff_t>(ker.half());
    const std::ptrdiff_t M = static_cast<std::ptrdiff_t>(m), N = static_cast<std::ptrdiff_t>(n);
    for (std::ptrdiff_t i = 0; i < M; ++i) {
        for (std::ptrdiff_t j = 0; j < N; ++j) {
            double acc = 0.0;
            for (std::ptrdiff_t r = -h; r <= h; ++r) {
                std::ptrdiff_t ii = i - r;
                if (ii < 0) ii += M;
                else if (ii >= M) ii -= M;
                for (std::ptrdiff_t c = -h; c <= h; ++c) {
                    std::ptrdiff_t jj = j - c;
                    if (jj < 0) jj += N;
                    else if (jj >= N) jj -= N;
                    acc += ker.at(r, c) * u(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj));
                }
            }
            out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = acc;
        }
    }
}

inline Image2D convolve(const Image2D& u, const BlurKernel& ker) {
    Image2D out(u.rows(), u.cols());
    convolve(u, ker, out);
    return out;
}

// Adjoint of convolve: convolution with the flipped kernel, so that
// <convolve(u), v> = <u, adjoint_convolve(v)>.
inline void adjoint_convolve(const Image2D& v, const BlurKernel& ker, Image2D& out) {
    BlurKernel flipped = ker;
    const std::size_t sz = ker.size;
    for (std::size_t r = 0; r < sz; ++r)
        for (std::size_t c = 0; c < sz; ++c)
            flipped.k[r * sz + c] = ker.k[(sz - 1 - r) * sz + (sz - 1 - c)];
    convolve(v, flipped, out);
}

inline Image2D adjoint_convolve(const Image2D& v, const BlurKernel& ker) {
    Image2D out(v.rows(), v.cols());
    adjoint_convolve(v, ker, out);
    return out;
}

}  // namespace treg
