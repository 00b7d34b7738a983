#pragma once

// ADMM for the truncated restoration models
//
//   E_ani(u) = sum_ij [ phi((D_x u)_ij) + phi((D_y u)_ij) ] + alpha/2 ||Au - f||^2
//   E_iso(u) = sum_ij phi(|(grad u)_ij|_2)                 + alpha/2 ||Au - f||^2
//
// with phi(x) = min(rho(|x|), rho(tau)).  Splitting q = grad u gives the
// augmented Lagrangian
//
//   L(u, q; mu) = alpha/2 ||Au-f||^2 + Phi(q) + <mu, q - grad u>
//                 + beta/2 ||q - grad u||^2
//
// and the loop
//
//   q^{k+1} = prox(grad u^k - mu^k/beta)        (exact, per pixel)
//   u^{k+1} solves (alpha A^T A + beta grad^T grad) u = alpha A^T f
//                                               + grad^T(mu^k + beta q^{k+1})
//   mu^{k+1} = mu^k + beta (q^{k+1} - grad u^{k+1})
//
// Stopping uses the running means  ubar^k = (1/(k+1)) sum_{j<=k} u^j:
// stop when  min( ||ubar^k - ubar^{k-1}|| / ||f||,
//                 ||qbar^k - grad ubar^k|| / ||grad f|| ) <= tol.
// The returned image is ubar at termination (final iterate behind a flag).

#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "treg/errors.hpp"
#include "treg/fft_solver.hpp"
#include "treg/grid_ops.hpp"
#include "treg/image.hpp"
#include "treg/potentials.hpp"
#include "treg/prox.hpp"

namespace treg {

// Forward operator of the data term: identity (denoise) or a circular
// convolution (deblur).
struct OperatorSpec {
    enum class Kind : std::uint8_t { Identity, Blur };
    Kind kind = Kind::Identity;
    BlurKernel kernel;

    static OperatorSpec identity() { return OperatorSpec{}; }
    static OperatorSpec blur(BlurKernel k) {
        OperatorSpec s;
        s.kind = Kind::Blur;
        s.kernel = std::move(k);
        return s;
    }

    bool is_identity() const { return kind == Kind::Identity; }

    void apply(const Image2D& in, Image2D& out) const {
        if (is_identity())
            out = in;
        else
            convolve(in, kernel, out);
    }
    void apply_adjoint(const Image2D& in, Image2D& out) const {
        if (is_identity())
            out = in;
        else
            adjoint_convolve(in, kernel, out);
    }
};

enum class AdmmMode : std::uint8_t { Anisotropic, Isotropic };

struct AdmmConfig {
    double alpha = 1.0;           // fidelity weight
    double beta = 1.0;            // splitting penalty
    TruncatedPotential reg = TruncatedPotential::untruncated(PotentialFamily::L1());
    AdmmMode mode = AdmmMode::Isotropic;
    std::size_t max_iters = 2000;
    double tol = 5e-5;
    std::uint64_t seed = 0;       // carried for provenance of degraded inputs
    bool and_stop = false;        // require both stopping measures <= tol
    bool return_final = false;    // return u^k instead of the running mean

    void validate() const {
        if (!(alpha > 0.0)) throw ConfigError("AdmmConfig: alpha must be positive");
        if (!(beta > 0.0)) throw ConfigError("AdmmConfig: beta must be positive");
        if (!(tol > 0.0)) throw ConfigError("AdmmConfig: tol must be positive");
        if (max_iters < 1) throw ConfigError("AdmmConfig: max_iters must be >= 1");
    }
};

struct AdmmTrace {
    std::vector<double> energy;      // E(u^k), Eq. model objective at the iterate
    std::vector<double> rel_u_mean;  // ||ubar^k - ubar^{k-1}|| / ||f||
    std::vector<double> rel_q_gap;   // ||qbar^k - grad ubar^k|| / ||grad f||
    std::vector<double> mu_drift;    // ||mu^{k+1} - mu^k||

    std::size_t iterations() const { return energy.size(); }

    void to_csv(std::ostream& os) const {
        os << "iter,energy,rel_u_mean,rel_q_gap,mu_drift\n";
        for (std::size_t k = 0; k < energy.size(); ++k) {
            os << (k + 1) << ',' << energy[k] << ',' << rel_u_mean[k] << ','
               << rel_q_gap[k] << ',' << mu_drift[k] << '\n';
        }
    }
};

// Thrown when non-finite values appear mid-run; carries the trace gathered
// so far for post-mortem inspection.
class DivergenceError : public std::runtime_error {
  public:
    DivergenceError(const std::string& what, AdmmTrace t)
        : std::runtime_error(what), trace(std::move(t)) {}
    AdmmTrace trace;
};

// KKT residuals of the constrained reformulation, evaluated at the final
// (non-averaged) iterates.  Stationarity in u holds by construction up to
// FFT roundoff: the mu-update makes alpha A^T(Au-f) = grad^T mu an algebraic
// identity of the u-subproblem's normal equations.
struct KktReport {
    double rel_gap = 0.0;           // ||q - grad u|| / ||grad f||
    double rel_stationarity = 0.0;  // ||alpha A^T(Au-f) - grad^T mu|| / ||alpha A^T f||
};

struct AdmmResult {
    Image2D u;        // reported solution (running mean unless return_final)
    Image2D u_final;  // last iterate
    AdmmTrace trace;
    std::size_t iters = 0;
    bool converged = false;
    KktReport kkt;
};

namespace detail {

inline double phi_sum(const DualField& q, const TruncatedPotential& reg, AdmmMode mode) {
    double s = 0.0;
    const std::size_t sz = q.x.size();
    if (mode == AdmmMode::Isotropic) {
        for (std::size_t k = 0; k < sz; ++k) s += reg.eval(std::hypot(q.x[k], q.y[k]));
    } else {
        for (std::size_t k = 0; k < sz; ++k)
            s += reg.eval(std::fabs(q.x[k])) + reg.eval(std::fabs(q.y[k]));
    }
    return s;
}

inline double fidelity(const Image2D& Au, const Image2D& f) {
    double s = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        const double d = Au[k] - f[k];
        s += d * d;
    }
    return s;
}

}  // namespace detail

// Model objective at u (Eq. 7.1 anisotropic / 7.2 isotropic).
inline double energy(const Image2D& u, const Image2D& f, const OperatorSpec& A,
                     const AdmmConfig& cfg) {
    check_same_shape(u, f, "energy");
    Image2D Au;
    A.apply(u, Au);
    const DualField gu = grad(u);
    return detail::phi_sum(gu, cfg.reg, cfg.mode) + 0.5 * cfg.alpha * detail::fidelity(Au, f);
}

// Augmented Lagrangian L(u, q; mu); used by the block-descent property
// tests and available for diagnostics.
inline double lagrangian(const Image2D& u, const DualField& q, const DualField& mu,
                         const Image2D& f, const OperatorSpec& A, const AdmmConfig& cfg) {
    check_same_shape(u, f, "lagrangian");
    Image2D Au;
    A.apply(u, Au);
    const DualField gu = grad(u);
    double s = detail::phi_sum(q, cfg.reg, cfg.mode) + 0.5 * cfg.alpha * detail::fidelity(Au, f);
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double rx = q.x[k] - gu.x[k];
        const double ry = q.y[k] - gu.y[k];
        s += mu.x[k] * rx + mu.y[k] * ry + 0.5 * cfg.beta * (rx * rx + ry * ry);
    }
    return s;
}

// One q-update: q <- prox(grad u - mu/beta), exact per pixel.
inline void q_update(const DualField& gu, const DualField& mu, const ProxKernel& prox,
                     AdmmMode mode, double beta, DualField& q) {
    const std::size_t sz = gu.x.size();
    const double inv_beta = 1.0 / beta;
    if (mode == AdmmMode::Isotropic) {
        for (std::size_t k = 0; k < sz; ++k)
            prox.vec(gu.x[k] - mu.x[k] * inv_beta, gu.y[k] - mu.y[k] * inv_beta, q.x[k], q.y[k]);
    } else {
        for (std::size_t k = 0; k < sz; ++k)
            prox.aniso(gu.x[k] - mu.x[k] * inv_beta, gu.y[k] - mu.y[k] * inv_beta, q.x[k],
                       q.y[k]);
    }
}

inline AdmmResult run_admm(const Image2D& f, const OperatorSpec& A, const AdmmConfig& cfg) {
    cfg.validate();
    for (std::size_t k = 0; k < f.size(); ++k)
        if (!std::isfinite(f[k])) throw DomainError("run_admm: input image has non-finite values");

    const std::size_t m = f.rows(), n = f.cols();
    const USolver solver(m, n, cfg.alpha, cfg.beta,
                         A.is_identity() ? nullptr : &A.kernel);
    const ProxKernel prox(cfg.reg, cfg.beta);

    // Constant part of the u-update right-hand side: alpha A^T f.
    Image2D atf;
    A.apply_adjoint(f, atf);
    const double atf_norm = atf.norm();

    // Stopping denominators (guarded against constant/zero inputs).
    const double f_norm = f.norm();
    const double den_f = (f_norm > 0.0) ? f_norm : 1.0;
    DualField gf = grad(f);
    const double gf_norm = gf.norm();
    const double den_gf = (gf_norm > 0.0) ? gf_norm : 1.0;

    // State: u^0 = f, q^0 = grad f, mu^0 = 0; means start at the 0-th terms.
    Image2D u = f;
    DualField gu = gf;
    DualField q = gf;
    DualField mu(m, n);
    Image2D u_mean = u;
    DualField q_mean = q;

    AdmmTrace trace;
    trace.energy.reserve(cfg.max_iters);
    trace.rel_u_mean.reserve(cfg.max_iters);
    trace.rel_q_gap.reserve(cfg.max_iters);
    trace.mu_drift.reserve(cfg.max_iters);

    Image2D rhs(m, n), Au(m, n), gadj(m, n);
    DualField p(m, n);

    bool converged = false;
    std::size_t iters = 0;
    for (std::size_t k = 0; k < cfg.max_iters; ++k) {
        // q-update (exact per-pixel prox at w = grad u^k - mu^k/beta).
        q_update(gu, mu, prox, cfg.mode, cfg.beta, q);

        // u-update via the FFT normal equations.
        for (std::size_t idx = 0; idx < p.x.size(); ++idx) {
            p.x[idx] = mu.x[idx] + cfg.beta * q.x[idx];
            p.y[idx] = mu.y[idx] + cfg.beta * q.y[idx];
        }
        grad_adjoint(p, gadj);
        for (std::size_t idx = 0; idx < rhs.size(); ++idx)
            rhs[idx] = cfg.alpha * atf[idx] + gadj[idx];
        solver.solve(rhs, u);
        grad(u, gu);

        // mu-update; its step length is the multiplier drift.
        double drift_sq = 0.0;
        for (std::size_t idx = 0; idx < mu.x.size(); ++idx) {
            const double rx = q.x[idx] - gu.x[idx];
            const double ry = q.y[idx] - gu.y[idx];
            mu.x[idx] += cfg.beta * rx;
            mu.y[idx] += cfg.beta * ry;
            drift_sq += rx * rx + ry * ry;
        }
        const double mu_drift = cfg.beta * std::sqrt(drift_sq);

        // Model energy at the new iterate (A u via the solver's symbol).
        solver.apply_A(u, Au);
        const double e = detail::phi_sum(gu, cfg.reg, cfg.mode) +
                         0.5 * cfg.alpha * detail::fidelity(Au, f);

        // Incremental running means:  mbar_new = mbar + (x_new - mbar)/(k+2).
        const double w_new = 1.0 / static_cast<double>(k + 2);
        double du_sq = 0.0;
        for (std::size_t idx = 0; idx < u.size(); ++idx) {
            const double step = (u[idx] - u_mean[idx]) * w_new;
            u_mean[idx] += step;
            du_sq += step * step;
        }
        for (std::size_t idx = 0; idx < q.x.size(); ++idx) {
            q_mean.x[idx] += (q.x[idx] - q_mean.x[idx]) * w_new;
            q_mean.y[idx] += (q.y[idx] - q_mean.y[idx]) * w_new;
        }
        const double rel_u_mean = std::sqrt(du_sq) / den_f;
        const DualField gum = grad(u_mean);
        const double rel_q_gap = diff_norm(q_mean, gum) / den_gf;

        trace.energy.push_back(e);
        trace.rel_u_mean.push_back(rel_u_mean);
        trace.rel_q_gap.push_back(rel_q_gap);
        trace.mu_drift.push_back(mu_drift);
        iters = k + 1;

        if (!std::isfinite(e) || !std::isfinite(rel_u_mean) || !std::isfinite(rel_q_gap))
            throw DivergenceError("run_admm: non-finite values at iteration " +
                                      std::to_string(iters),
                                  std::move(trace));

        const bool stop = cfg.and_stop
                              ? (rel_u_mean <= cfg.tol && rel_q_gap <= cfg.tol)
                              : (std::min(rel_u_mean, rel_q_gap) <= cfg.tol);
        if (stop) {
            converged = true;
            break;
        }
    }

    AdmmResult out;
    out.u = cfg.return_final ? u : u_mean;
    out.u_final = std::move(u);
    out.trace = std::move(trace);
    out.iters = iters;
    out.converged = converged;

    // KKT residuals at the final iterates (u^k, q^k, mu^k).
    {
        const Image2D& uf = out.u_final;
        out.kkt.rel_gap = diff_norm(q, gu) / den_gf;
        Image2D Auf(m, n), r(m, n), atr(m, n);
        solver.apply_A(uf, Auf);
        for (std::size_t idx = 0; idx < r.size(); ++idx) r[idx] = Auf[idx] - f[idx];
        solver.apply_At(r, atr);
        grad_adjoint(mu, gadj);
        double num = 0.0;
        for (std::size_t idx = 0; idx < r.size(); ++idx) {
            const double d = cfg.alpha * atr[idx] - gadj[idx];
            num += d * d;
        }
        const double den = (atf_norm > 0.0) ? cfg.alpha * atf_norm : 1.0;
        out.kkt.rel_stationarity = std::sqrt(num) / den;
    }
    return out;
}

}  // namespace treg
