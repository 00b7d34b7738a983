#pragma once

// FFT solver for the quadratic u-subproblem
//
//     (alpha A^T A + beta grad^T grad) u = rhs
//
// on the periodic grid, where A is either the identity (denoising) or a
// circular convolution (deblurring).  Both operators are diagonalized by
// the 2D DFT, so the solve is one forward transform, a pointwise divide by
// the precomputed symbol
//
//     denom(k,l) = alpha |Ahat(k,l)|^2 + beta (4 sin^2(pi k/m) + 4 sin^2(pi l/n))
//
// and one inverse transform.  Plans use FFTW_ESTIMATE so results do not
// depend on planner timing runs.

#include <fftw3.h>

#include <cmath>
#include <vector>

#include "treg/errors.hpp"
#include "treg/grid_ops.hpp"
#include "treg/image.hpp"

namespace treg {

class USolver {
  public:
    // blur == nullptr means A = I.
    USolver(std::size_t m, std::size_t n, double alpha, double beta,
            const BlurKernel* blur = nullptr)
        : m_(m), n_(n), nc_(n / 2 + 1) {
        if (m == 0 || n == 0) throw ConfigError("USolver: empty grid");
        if (!(alpha > 0.0)) throw ConfigError("USolver: alpha must be positive");
        if (!(beta > 0.0)) throw ConfigError("USolver: beta must be positive");

        real_ = fftw_alloc_real(m_ * n_);
        spec_ = fftw_alloc_complex(m_ * nc_);
        if (!real_ || !spec_) throw InternalError("USolver: fftw allocation failed");
        fwd_ = fftw_plan_dft_r2c_2d(static_cast<int>(m_), static_cast<int>(n_), real_, spec_,
                                    FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_c2r_2d(static_cast<int>(m_), static_cast<int>(n_), spec_, real_,
                                    FFTW_ESTIMATE);
        if (!fwd_ || !bwd_) throw InternalError("USolver: fftw planning failed");

        // |Ahat|^2 on the half spectrum.
        std::vector<double> asq(m_ * nc_, 1.0);
        if (blur != nullptr) {
            has_blur_ = true;
            if (blur->size > m_ || blur->size > n_)
                throw ConfigError("USolver: kernel larger than image");
            // Embed the centered kernel periodically at the origin and
            // transform it once.
            for (std::size_t k = 0; k < m_ * n_; ++k) real_[k] = 0.0;
            const std::ptrdiff_t h = static_cast<std::ptrdiff_t>(blur->half());
            for (std::ptrdiff_t r = -h; r <= h; ++r)
                for (std::ptrdiff_t c = -h; c <= h; ++c) {
                    const std::size_t i = static_cast<std::size_t>((r + static_cast<std::ptrdiff_t>(m_)) %
                                                                   static_cast<std::ptrdiff_t>(m_));
                    const std::size_t j = static_cast<std::size_t>((c + static_cast<std::ptrdiff_t>(n_)) %
                                                                   static_cast<std::ptrdiff_t>(n_));
                    real_[i * n_ + j] += blur->at(r, c);
                }
            fftw_execute(fwd_);
            ahat_.resize(2 * m_ * nc_);
            for (std::size_t k = 0; k < m_ * nc_; ++k) {
                ahat_[2 * k] = spec_[k][0];
                ahat_[2 * k + 1] = spec_[k][1];
                asq[k] = spec_[k][0] * spec_[k][0] + spec_[k][1] * spec_[k][1];
            }
        }

        denom_.resize(m_ * nc_);
        for (std::size_t i = 0; i < m_; ++i) {
            const double sy = std::sin(M_PI * static_cast<double>(i) / static_cast<double>(m_));
            const double ly = 4.0 * sy * sy;
            for (std::size_t j = 0; j < nc_; ++j) {
                const double sx = std::sin(M_PI * static_cast<double>(j) / static_cast<double>(n_));
                const double lap = ly + 4.0 * sx * sx;
                denom_[i * nc_ + j] = alpha * asq[i * nc_ + j] + beta * lap;
            }
        }
        // The operator is singular iff some frequency is killed by both A
        // and the gradient (for the gradient that is only the DC mode, so
        // in practice: a kernel with zero mean).
        for (double d : denom_)
            if (!(d > 1e-14))
                throw IllPosedOperatorError(
                    "USolver: alpha A^T A + beta grad^T grad is singular "
                    "(blur kernel annihilates a frequency shared with the gradient)");
    }

    USolver(const USolver&) = delete;
    USolver& operator=(const USolver&) = delete;

    ~USolver() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(real_);
        fftw_free(spec_);
    }

    std::size_t rows() const { return m_; }
    std::size_t cols() const { return n_; }

    void solve(const Image2D& rhs, Image2D& u) const {
        if (rhs.rows() != m_ || rhs.cols() != n_) throw DomainError("USolver::solve: shape mismatch");
        if (u.rows() != m_ || u.cols() != n_) u = Image2D(m_, n_);
        for (std::size_t k = 0; k < m_ * n_; ++k) real_[k] = rhs[k];
        fftw_execute(fwd_);
        for (std::size_t k = 0; k < m_ * nc_; ++k) {
            spec_[k][0] /= denom_[k];
            spec_[k][1] /= denom_[k];
        }
        fftw_execute(bwd_);
        const double scale = 1.0 / static_cast<double>(m_ * n_);
        for (std::size_t k = 0; k < m_ * n_; ++k) u[k] = real_[k] * scale;
    }

    Image2D solve(const Image2D& rhs) const {
        Image2D u(m_, n_);
        solve(rhs, u);
        return u;
    }

    bool has_blur() const { return has_blur_; }

    // A v via the stored symbol (identity when no blur was given); adjoint
    // multiplies by the conjugate instead.  Matches the direct circular
    // convolution up to FFT roundoff.
    void apply_A(const Image2D& v, Image2D& out) const { apply_symbol(v, out, false); }
    void apply_At(const Image2D& v, Image2D& out) const { apply_symbol(v, out, true); }

  private:
    void apply_symbol(const Image2D& v, Image2D& out, bool conj) const {
        if (v.rows() != m_ || v.cols() != n_) throw DomainError("USolver::apply: shape mismatch");
        if (out.rows() != m_ || out.cols() != n_) out = Image2D(m_, n_);
        if (!has_blur_) {
            for (std::size_t k = 0; k < m_ * n_; ++k) out[k] = v[k];
            return;
        }
        for (std::size_t k = 0; k < m_ * n_; ++k) real_[k] = v[k];
        fftw_execute(fwd_);
        for (std::size_t k = 0; k < m_ * nc_; ++k) {
            const double ar = ahat_[2 * k];
            const double ai = conj ? -ahat_[2 * k + 1] : ahat_[2 * k + 1];
            const double vr = spec_[k][0], vi = spec_[k][1];
            spec_[k][0] = ar * vr - ai * vi;
            spec_[k][1] = ar * vi + ai * vr;
        }
        fftw_execute(bwd_);
        const double scale = 1.0 / static_cast<double>(m_ * n_);
        for (std::size_t k = 0; k < m_ * n_; ++k) out[k] = real_[k] * scale;
    }

    std::size_t m_, n_, nc_;
    bool has_blur_ = false;
    // Work buffers are mutable in spirit: solve() is logically const.
    double* real_ = nullptr;
    fftw_complex* spec_ = nullptr;
    fftw_plan fwd_ = nullptr, bwd_ = nullptr;
    std::vector<double> denom_;
    std::vector<double> ahat_;  // interleaved re/im of the blur symbol
};

}  // namespace treg
