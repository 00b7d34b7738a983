#pragma once

// Exact proximal operator for truncated potentials:
//
//     prox(t) = argmin_{s >= 0}  min(rho(s), rho(tau)) + (beta/2) (s - t)^2
//
// Split into the two branches
//     chi1(s) = rho(s)      + (beta/2)(s - t)^2   (active on [0, tau])
//     chi2(s) = rho(tau)    + (beta/2)(s - t)^2   (active on [tau, inf))
// chi2 is minimized at s2 = max(t, tau).  chi1 is minimized exactly by a
// candidate-set argument: rho'' is nondecreasing on (0, inf) for the
// supported families, so chi1 is convex on [s_L, inf) where
// s_L = inf { s : rho''(s) > -beta }, and any interior stationary point of
// chi1 in (0, t] lies in [s_L, t].  The global chi1 minimizer over [0, tau]
// is then one of {0, min(sbar, tau)} with sbar the root of chi1' in
// [s_L, t] (when it exists).
//
// Closed-form roots are used where available (l1, log, l2); otherwise
// Brent's method on the bracket [s_L, t].  SCAD is handled separately by
// piecewise quadratic minimization since its curvature is not monotone.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "treg/errors.hpp"
#include "treg/potentials.hpp"
#include "treg/rootfind.hpp"

namespace treg {

enum class ProxBranch : std::uint8_t {
    Chi1,  // minimizer comes from the untruncated branch, s* <= tau
    Chi2,  // minimizer sits on the flat tail, s* = max(t, tau)
    Tie,   // both branches attain the minimum (within 1e-12)
};

inline const char* prox_branch_name(ProxBranch b) {
    switch (b) {
        case ProxBranch::Chi1: return "chi1";
        case ProxBranch::Chi2: return "chi2";
        case ProxBranch::Tie: return "tie";
    }
    return "?";
}

struct ProxProblem {
    TruncatedPotential reg;
    double beta = 1.0;
    double t = 0.0;  // vector callers pass t = |w|
};

struct ProxResult {
    double s_star = 0.0;   // reported minimizer (chi1 candidate on ties)
    double value = 0.0;    // objective value at s_star
    ProxBranch branch = ProxBranch::Chi1;
    std::optional<double> tie = std::nullopt;  // second minimizer on a tie
};

// Tolerance for declaring the two branch minima equal.
inline constexpr double kProxTieTol = 1e-12;

// s_L = inf { s > 0 : rho''(s) > -beta } in closed form for the families
// with nondecreasing curvature.  beta > 0 required.
inline double lower_bound_sL(const PotentialFamily& fam, double beta) {
    if (!(beta > 0.0)) throw ConfigError("lower_bound_sL: beta must be positive");
    switch (fam.kind()) {
        case FamilyKind::L1:
            return 0.0;
        case FamilyKind::Lp: {
            // rho''(s) = p(p-1) s^{p-2} = -beta  =>  s = (p(1-p)/beta)^{1/(2-p)}
            const double p = fam.p();
            return std::pow(p * (1.0 - p) / beta, 1.0 / (2.0 - p));
        }
        case FamilyKind::Log: {
            // rho''(s) = -theta^2/(1+theta s)^2 = -beta  =>  s = 1/sqrt(beta) - 1/theta
            const double th = fam.theta();
            return std::max(0.0, 1.0 / std::sqrt(beta) - 1.0 / th);
        }
        case FamilyKind::Frac: {
            // rho''(s) = -2 theta^2/(1+theta s)^3 = -beta
            const double th = fam.theta();
            return std::max(0.0, std::cbrt(2.0 / (th * beta)) - 1.0 / th);
        }
        case FamilyKind::L2:
            return 0.0;  // rho'' = 1 > -beta everywhere
        default:
            throw UnsupportedFamilyError("lower_bound_sL: no curvature bound for family " +
                                         std::string(family_name(fam.kind())));
    }
}

// Reference implementation of s_L by bisection on rho''(s) + beta over
// s in [lo, hi]; assumes rho'' nondecreasing.  Used in tests to cross-check
// the closed forms.
inline double lower_bound_sL_bisect(const PotentialFamily& fam, double beta,
                                    double lo = 1e-12, double hi = 1e6) {
    const auto g = [&](double s) { return fam.second_deriv(s) + beta; };
    if (g(lo) > 0.0) return 0.0;       // curvature already above -beta near 0
    if (g(hi) <= 0.0) return hi;       // pathological; not hit by supported params
    return bisect_root(g, lo, hi);
}

namespace detail {

// Stationary point of chi1 in [s_L, t]: root of rho'(s) + beta (s - t).
// Preconditions: bracket is valid, chi1'(s_lo) < 0 (checked by caller),
// chi1'(t) = rho'(t) > 0 for the families that reach here.
inline double chi1_stationary(const PotentialFamily& fam, double beta, double t,
                              double s_lo) {
    switch (fam.kind()) {
        case FamilyKind::L1:
            // 1 + beta (s - t) = 0
            return t - 1.0 / beta;
        case FamilyKind::Log: {
            // theta/(1+theta s) + beta (s - t) = 0
            // =>  s^2 + b s + c = 0 with b = (1 - theta t)/theta,
            //     c = 1/beta - t/theta; the root in [s_L, t] is the larger
            // one.  Use the product form when b > 0 to avoid cancellation.
            const double th = fam.theta();
            const double b = (1.0 - th * t) / th;
            const double c = 1.0 / beta - t / th;
            const double disc = b * b - 4.0 * c;
            if (disc <= 0.0)
                throw InternalError("chi1_stationary: log discriminant not positive");
            const double sq = std::sqrt(disc);
            return (b > 0.0) ? (-2.0 * c / (b + sq)) : (0.5 * (-b + sq));
        }
        case FamilyKind::L2:
            // s + beta (s - t) = 0 on (0, inf) has no root; handled upstream.
            return beta * t / (1.0 + beta);
        default: {
            // s = 0 can be a bracket endpoint (frac with large theta*beta);
            // substitute the one-sided slope there since deriv() rejects 0.
            const auto dchi1 = [&](double s) {
                const double ds = (s > 0.0) ? fam.deriv(s) : fam.deriv_at_zero_plus();
                return ds + beta * (s - t);
            };
            if (!(dchi1(t) > 0.0))
                throw InternalError("chi1_stationary: lost root bracket (family=" +
                                    std::string(family_name(fam.kind())) +
                                    ", beta=" + std::to_string(beta) +
                                    ", t=" + std::to_string(t) + ")");
            return brent_root(dchi1, s_lo, t);
        }
    }
}

}  // namespace detail

// Global minimizer of chi1 over [0, tau_cap] (tau_cap may be +inf for the
// untruncated problem).  Returns {argmin, value}.
inline std::pair<double, double> minimize_chi1(const TruncatedPotential& reg, double beta,
                                               double t) {
    const PotentialFamily& fam = reg.base();
    const double tau = reg.tau();
    const auto chi1 = [&](double s) { return fam.eval(s) + 0.5 * beta * (s - t) * (s - t); };

    if (t <= 0.0) return {0.0, chi1(0.0)};

    if (fam.kind() == FamilyKind::L2) {
        // chi1 strictly convex with interior stationary point beta t/(1+beta).
        const double s = std::min(beta * t / (1.0 + beta), tau);
        return {s, chi1(s)};
    }
    if (fam.kind() == FamilyKind::Scad)
        throw UnsupportedFamilyError("minimize_chi1: use prox_scad for scad");
    if (!fam.has_monotone_curvature())
        throw UnsupportedFamilyError("minimize_chi1: family " +
                                     std::string(family_name(fam.kind())) +
                                     " lacks a monotone-curvature prox path");

    const double s_lo = lower_bound_sL(fam, beta);

    // Decide whether chi1 decreases somewhere right of s_lo.  When s_lo = 0
    // the family has a finite slope at 0+ (l1/log/frac), so the one-sided
    // derivative rho'(0+) - beta t is meaningful; for lp, s_lo > 0 always.
    double slope_lo;
    if (s_lo > 0.0) {
        if (s_lo >= t) return {0.0, chi1(0.0)};  // bracket empty: no interior root
        slope_lo = fam.deriv(s_lo) + beta * (s_lo - t);
    } else {
        slope_lo = fam.deriv_at_zero_plus() - beta * t;
    }
    if (slope_lo >= 0.0) return {0.0, chi1(0.0)};

    const double sbar = detail::chi1_stationary(fam, beta, t, std::max(s_lo, 0.0));
    const double cand = std::min(sbar, tau);
    const double v0 = chi1(0.0);
    const double vc = chi1(cand);
    if (v0 <= vc) return {0.0, v0};
    return {cand, vc};
}

// Exact prox for a SCAD penalty (theta, a) without outer truncation: SCAD
// is already constant beyond a*theta.  Piecewise quadratic on [0, theta],
// [theta, a*theta], [a*theta, inf): minimize each piece and compare.
inline ProxResult prox_scad(const PotentialFamily& fam, double beta, double t) {
    if (fam.kind() != FamilyKind::Scad)
        throw UnsupportedFamilyError("prox_scad: not a scad family");
    if (!(beta > 0.0)) throw ConfigError("prox_scad: beta must be positive");
    if (t < 0.0) throw DomainError("prox_scad: t must be nonnegative");

    const double th = fam.theta();
    const double a = fam.a();
    const auto psi = [&](double s) { return fam.eval(s) + 0.5 * beta * (s - t) * (s - t); };

    std::array<double, 6> cands{};
    std::size_t n = 0;
    cands[n++] = 0.0;
    cands[n++] = th;
    cands[n++] = a * th;
    // Piece 1: theta s + quadratic, stationary at t - theta/beta.
    cands[n++] = std::clamp(t - th / beta, 0.0, th);
    // Piece 2: quadratic with curvature beta - 1/(a-1); only a stationary
    // minimum when that is positive, otherwise the endpoints (already
    // listed) cover it.
    const double curv = beta - 1.0 / (a - 1.0);
    if (curv > 0.0)
        cands[n++] = std::clamp((beta * t - a * th / (a - 1.0)) / curv, th, a * th);
    // Piece 3: constant + quadratic, minimized at max(t, a*theta).
    cands[n++] = std::max(t, a * th);

    double best_s = cands[0];
    double best_v = psi(best_s);
    for (std::size_t i = 1; i < n; ++i) {
        const double v = psi(cands[i]);
        if (v < best_v) {
            best_v = v;
            best_s = cands[i];
        }
    }

    ProxResult r;
    r.s_star = best_s;
    r.value = best_v;
    r.branch = (best_s >= a * th) ? ProxBranch::Chi2 : ProxBranch::Chi1;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::fabs(cands[i] - best_s) > 1e-9 && std::fabs(psi(cands[i]) - best_v) <= kProxTieTol) {
            r.branch = ProxBranch::Tie;
            r.tie = cands[i];
            break;
        }
    }
    return r;
}

inline ProxResult prox_scad(double beta, double theta, double a, double t) {
    return prox_scad(PotentialFamily::Scad(theta, a), beta, t);
}

// Exact scalar prox of the truncated potential at t >= 0.
inline ProxResult prox_scalar(const TruncatedPotential& reg, double beta, double t) {
    if (!(beta > 0.0)) throw ConfigError("prox_scalar: beta must be positive");
    if (std::isnan(t)) throw DomainError("prox_scalar: t is NaN");
    if (t < 0.0) throw DomainError("prox_scalar: t must be nonnegative");

    if (reg.base().kind() == FamilyKind::Scad) return prox_scad(reg.base(), beta, t);

    auto [s1, v1] = minimize_chi1(reg, beta, t);
    ProxResult r;
    if (!reg.truncated()) {
        r.s_star = s1;
        r.value = v1;
        r.branch = ProxBranch::Chi1;
        return r;
    }

    const double s2 = std::max(t, reg.tau());
    const double v2 = reg.tail_value() + 0.5 * beta * (s2 - t) * (s2 - t);
    if (std::fabs(v1 - v2) <= kProxTieTol) {
        r.s_star = s1;
        r.value = v1;
        r.branch = ProxBranch::Tie;
        r.tie = s2;
    } else if (v1 < v2) {
        r.s_star = s1;
        r.value = v1;
        r.branch = ProxBranch::Chi1;
    } else {
        r.s_star = s2;
        r.value = v2;
        r.branch = ProxBranch::Chi2;
    }
    return r;
}

inline ProxResult prox_scalar(const ProxProblem& p) { return prox_scalar(p.reg, p.beta, p.t); }

inline std::pair<double, double> minimize_chi1(const ProxProblem& p) {
    return minimize_chi1(p.reg, p.beta, p.t);
}

// Signed scalar prox of phi(x) = min(rho(|x|), rho(tau)) (anisotropic case):
// by symmetry, prox(w) = sign(w) * prox(|w|).
inline ProxResult prox_signed(const TruncatedPotential& reg, double beta, double w) {
    ProxResult r = prox_scalar(reg, beta, std::fabs(w));
    if (w < 0.0) {
        r.s_star = -r.s_star;
        if (r.tie) r.tie = -*r.tie;
    }
    return r;
}

struct ProxVectorResult {
    std::array<double, 2> z{0.0, 0.0};
    double radius = 0.0;  // |z|
    ProxBranch branch = ProxBranch::Chi1;
    bool tie = false;
};

// Prox of phi(x) = min(rho(|x|_2), rho(tau)) over x in R^2 (isotropic case).
// The minimizer is radial: z = (s*/|w|) w with s* the scalar prox of |w|;
// w = 0 maps to 0.
inline ProxVectorResult prox_vector(const TruncatedPotential& reg, double beta,
                                    const std::array<double, 2>& w) {
    ProxVectorResult out;
    const double r = std::hypot(w[0], w[1]);
    if (r == 0.0) return out;
    const ProxResult sc = prox_scalar(reg, beta, r);
    const double scale = sc.s_star / r;
    out.z = {scale * w[0], scale * w[1]};
    out.radius = sc.s_star;
    out.branch = sc.branch;
    out.tie = (sc.branch == ProxBranch::Tie);
    return out;
}

// Precomputed per-(reg, beta) prox context for hot loops: hoists parameter
// checks and the curvature bound out of the per-pixel call.
class ProxKernel {
  public:
    ProxKernel(TruncatedPotential reg, double beta) : reg_(std::move(reg)), beta_(beta) {
        if (!(beta_ > 0.0)) throw ConfigError("ProxKernel: beta must be positive");
        // Validate once that the family is supported by the prox machinery.
        // t = 1 rather than 0: the t <= 0 early-out would skip the family
        // checks and defer the error into the per-pixel loop.
        (void)prox_scalar(reg_, beta_, 1.0);
    }

    const TruncatedPotential& reg() const { return reg_; }
    double beta() const { return beta_; }

    double scalar(double t) const { return prox_scalar(reg_, beta_, t).s_star; }

    // Isotropic: shrink the 2-vector (wx, wy) radially.
    void vec(double wx, double wy, double& zx, double& zy) const {
        const double r = std::hypot(wx, wy);
        if (r == 0.0) {
            zx = zy = 0.0;
            return;
        }
        const double scale = prox_scalar(reg_, beta_, r).s_star / r;
        zx = scale * wx;
        zy = scale * wy;
    }

    // Anisotropic: shrink each component independently (signed).
    void aniso(double wx, double wy, double& zx, double& zy) const {
        zx = std::copysign(prox_scalar(reg_, beta_, std::fabs(wx)).s_star, wx);
        zy = std::copysign(prox_scalar(reg_, beta_, std::fabs(wy)).s_star, wy);
    }

  private:
    TruncatedPotential reg_;
    double beta_;
};

}  // namespace treg
