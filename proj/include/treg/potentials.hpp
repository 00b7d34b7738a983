#pragma once

// Catalog of scalar potential (regularizer) functions rho(s), s >= 0, and
// their truncated versions rho(min(s, tau)).
//
// Families (parameters: 0 < p < 1, theta > 0, a > 2):
//   L1      rho(s) = s
//   Lp      rho(s) = s^p
//   Log     rho(s) = ln(theta*s + 1)
//   Frac    rho(s) = theta*s / (1 + theta*s)
//   ZeroOne rho(0) = 0, rho(s) = 1 for s > 0
//   LogP    rho(s) = ln(theta*s^p + 1)
//   FracP   rho(s) = theta*s^p / (1 + theta*s^p)
//   Scad    rho(s) = theta*s                                  s <= theta
//                    (-s^2 - theta^2 + 2a*theta*s)/(2(a-1))   theta < s < a*theta
//                    (a+1)*theta^2/2                          s >= a*theta
//   L2      rho(s) = s^2/2   (smooth at zero; kept for truncated-quadratic runs)
//
// All families are checked against: rho(0) = 0 with 0 a strict minimizer,
// rho nondecreasing, and (for L1/Lp/Log/Frac) rho'' either identically 0 or
// negative and strictly increasing.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>

#include "treg/errors.hpp"

namespace treg {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class FamilyKind : std::uint8_t { L1, Lp, Log, Frac, ZeroOne, LogP, FracP, Scad, L2 };

inline const char* family_name(FamilyKind k) {
    switch (k) {
        case FamilyKind::L1: return "l1";
        case FamilyKind::Lp: return "lp";
        case FamilyKind::Log: return "log";
        case FamilyKind::Frac: return "frac";
        case FamilyKind::ZeroOne: return "zeroone";
        case FamilyKind::LogP: return "logp";
        case FamilyKind::FracP: return "fracp";
        case FamilyKind::Scad: return "scad";
        case FamilyKind::L2: return "l2";
    }
    return "?";
}

class PotentialFamily {
public:
    static PotentialFamily L1() { return PotentialFamily(FamilyKind::L1); }
    static PotentialFamily Lp(double p) {
        PotentialFamily f(FamilyKind::Lp);
        f.p_ = p;
        f.validate();
        return f;
    }
    static PotentialFamily Log(double theta) {
        PotentialFamily f(FamilyKind::Log);
        f.theta_ = theta;
        f.validate();
        return f;
    }
    static PotentialFamily Frac(double theta) {
        PotentialFamily f(FamilyKind::Frac);
        f.theta_ = theta;
        f.validate();
        return f;
    }
    static PotentialFamily ZeroOne() { return PotentialFamily(FamilyKind::ZeroOne); }
    static PotentialFamily LogP(double theta, double p) {
        PotentialFamily f(FamilyKind::LogP);
        f.theta_ = theta;
        f.p_ = p;
        f.validate();
        return f;
    }
    static PotentialFamily FracP(double theta, double p) {
        PotentialFamily f(FamilyKind::FracP);
        f.theta_ = theta;
        f.p_ = p;
        f.validate();
        return f;
    }
    static PotentialFamily Scad(double theta, double a = 3.7) {
        PotentialFamily f(FamilyKind::Scad);
        f.theta_ = theta;
        f.a_ = a;
        f.validate();
        return f;
    }
    static PotentialFamily L2() { return PotentialFamily(FamilyKind::L2); }

    FamilyKind kind() const { return kind_; }
    double p() const { return p_; }
    double theta() const { return theta_; }
    double a() const { return a_; }

    double eval(double s) const {
        if (s < 0.0) throw DomainError("potential eval: s must be >= 0");
        switch (kind_) {
            case FamilyKind::L1: return s;
            case FamilyKind::Lp: return std::pow(s, p_);
            case FamilyKind::Log: return std::log1p(theta_ * s);
            case FamilyKind::Frac: return theta_ * s / (1.0 + theta_ * s);
            case FamilyKind::ZeroOne: return s == 0.0 ? 0.0 : 1.0;
            case FamilyKind::LogP: return std::log1p(theta_ * std::pow(s, p_));
            case FamilyKind::FracP: {
                const double t = theta_ * std::pow(s, p_);
                return t / (1.0 + t);
            }
            case FamilyKind::Scad: {
                if (s <= theta_) return theta_ * s;
                if (s >= a_ * theta_) return (a_ + 1.0) * theta_ * theta_ / 2.0;
                return (-s * s - theta_ * theta_ + 2.0 * a_ * theta_ * s) / (2.0 * (a_ - 1.0));
            }
            case FamilyKind::L2: return 0.5 * s * s;
        }
        throw InternalError("unreachable family kind");
    }

    // First derivative on s > 0. SCAD at its two breakpoints returns the
    // left-piece value (the formula is continuous there anyway).
    double deriv(double s) const {
        if (s <= 0.0) throw DomainError("potential deriv: s must be > 0 (use deriv_at_zero_plus)");
        switch (kind_) {
            case FamilyKind::L1: return 1.0;
            case FamilyKind::Lp: return p_ * std::pow(s, p_ - 1.0);
            case FamilyKind::Log: return theta_ / (theta_ * s + 1.0);
            case FamilyKind::Frac: {
                const double d = 1.0 + theta_ * s;
                return theta_ / (d * d);
            }
            case FamilyKind::ZeroOne:
                throw DomainError("zeroone potential has no pointwise derivative");
            case FamilyKind::LogP: {
                const double sp = std::pow(s, p_);
                return p_ * theta_ * sp / (s * (theta_ * sp + 1.0));
            }
            case FamilyKind::FracP: {
                const double g = 1.0 + theta_ * std::pow(s, p_);
                return p_ * theta_ * std::pow(s, p_ - 1.0) / (g * g);
            }
            case FamilyKind::Scad: {
                if (s <= theta_) return theta_;
                if (s <= a_ * theta_) return (a_ * theta_ - s) / (a_ - 1.0);
                return 0.0;
            }
            case FamilyKind::L2: return s;
        }
        throw InternalError("unreachable family kind");
    }

    // Second derivative on s > 0, left-piece value at SCAD breakpoints.
    double second_deriv(double s) const {
        if (s <= 0.0) throw DomainError("potential second_deriv: s must be > 0");
        switch (kind_) {
            case FamilyKind::L1: return 0.0;
            case FamilyKind::Lp: return p_ * (p_ - 1.0) * std::pow(s, p_ - 2.0);
            case FamilyKind::Log: {
                const double d = theta_ * s + 1.0;
                return -theta_ * theta_ / (d * d);
            }
            case FamilyKind::Frac: {
                const double d = 1.0 + theta_ * s;
                return -2.0 * theta_ * theta_ / (d * d * d);
            }
            case FamilyKind::ZeroOne:
                throw DomainError("zeroone potential has no pointwise derivative");
            case FamilyKind::LogP: {
                const double sp = std::pow(s, p_);
                const double g = theta_ * sp + 1.0;
                return p_ * theta_ * std::pow(s, p_ - 2.0) * (p_ - 1.0 - theta_ * sp) / (g * g);
            }
            case FamilyKind::FracP: {
                const double sp = std::pow(s, p_);
                const double g = 1.0 + theta_ * sp;
                return p_ * theta_ * std::pow(s, p_ - 2.0) *
                       ((p_ - 1.0) * g - 2.0 * p_ * theta_ * sp) / (g * g * g);
            }
            case FamilyKind::Scad: {
                if (s <= theta_) return 0.0;
                if (s <= a_ * theta_) return -1.0 / (a_ - 1.0);
                return 0.0;
            }
            case FamilyKind::L2: return 1.0;
        }
        throw InternalError("unreachable family kind");
    }

    // lim_{s->0+} rho'(s); +inf for the families whose derivative blows up.
    double deriv_at_zero_plus() const {
        switch (kind_) {
            case FamilyKind::L1: return 1.0;
            case FamilyKind::Lp: return kInf;
            case FamilyKind::Log: return theta_;
            case FamilyKind::Frac: return theta_;
            case FamilyKind::ZeroOne: return kInf;
            case FamilyKind::LogP: return kInf;
            case FamilyKind::FracP: return kInf;
            case FamilyKind::Scad: return theta_;
            case FamilyKind::L2: return 0.0;
        }
        throw InternalError("unreachable family kind");
    }

    bool smooth_at_zero() const { return kind_ == FamilyKind::L2; }

    // The four families with rho'' <= 0 monotone (the second-order lower
    // bound machinery applies to exactly these).
    bool has_monotone_curvature() const {
        return kind_ == FamilyKind::L1 || kind_ == FamilyKind::Lp || kind_ == FamilyKind::Log ||
               kind_ == FamilyKind::Frac;
    }

    std::string describe() const {
        std::string s = family_name(kind_);
        switch (kind_) {
            case FamilyKind::Lp: s += "(p=" + std::to_string(p_) + ")"; break;
            case FamilyKind::Log:
            case FamilyKind::Frac: s += "(theta=" + std::to_string(theta_) + ")"; break;
            case FamilyKind::LogP:
            case FamilyKind::FracP:
                s += "(theta=" + std::to_string(theta_) + ",p=" + std::to_string(p_) + ")";
                break;
            case FamilyKind::Scad:
                s += "(theta=" + std::to_string(theta_) + ",a=" + std::to_string(a_) + ")";
                break;
            default: break;
        }
        return s;
    }

private:
    explicit PotentialFamily(FamilyKind k) : kind_(k) {}

    void validate() const {
        const bool needs_p =
            kind_ == FamilyKind::Lp || kind_ == FamilyKind::LogP || kind_ == FamilyKind::FracP;
        const bool needs_theta = kind_ == FamilyKind::Log || kind_ == FamilyKind::Frac ||
                                 kind_ == FamilyKind::LogP || kind_ == FamilyKind::FracP ||
                                 kind_ == FamilyKind::Scad;
        if (needs_p && !(p_ > 0.0 && p_ < 1.0))
            throw ConfigError(std::string(family_name(kind_)) + ": p must lie in (0,1)");
        if (needs_theta && !(theta_ > 0.0))
            throw ConfigError(std::string(family_name(kind_)) + ": theta must be > 0");
        if (kind_ == FamilyKind::Scad && !(a_ > 2.0))
            throw ConfigError("scad: a must be > 2");
    }

    FamilyKind kind_;
    double p_ = 0.0;
    double theta_ = 0.0;
    double a_ = 0.0;
};

// rho(min(s, tau)): flat (value rho(tau)) on [tau, inf). tau = +inf means no
// truncation and the wrapper degenerates to the base family.
class TruncatedPotential {
public:
    TruncatedPotential(PotentialFamily base, double tau) : base_(base), tau_(tau) {
        if (std::isnan(tau) || tau <= 0.0)
            throw ConfigError("truncation level tau must be > 0 (or +inf for none)");
    }

    static TruncatedPotential untruncated(PotentialFamily base) {
        return TruncatedPotential(base, kInf);
    }

    const PotentialFamily& base() const { return base_; }
    double tau() const { return tau_; }
    bool truncated() const { return std::isfinite(tau_); }

    double eval(double s) const { return base_.eval(std::min(s, tau_)); }

    // Value on the flat tail; +inf when untruncated (the tail is empty).
    double tail_value() const { return truncated() ? base_.eval(tau_) : kInf; }

    // Left derivative at the kink s = tau, zero beyond it.
    double deriv(double s) const {
        if (s <= 0.0) throw DomainError("truncated deriv: s must be > 0");
        if (s <= tau_) return base_.deriv(s);
        return 0.0;
    }

    double deriv_at_zero_plus() const { return base_.deriv_at_zero_plus(); }

    std::string describe() const {
        if (!truncated()) return base_.describe();
        return "tr-" + base_.describe() + "@tau=" + std::to_string(tau_);
    }

private:
    PotentialFamily base_;
    double tau_;
};

struct SubadditivityReport {
    bool passed = true;
    std::size_t samples = 0;
    // First counterexample, when one was found.
    double a = 0.0, b = 0.0, lhs = 0.0, rhs = 0.0;
};

// Randomized check of rho(a+b) <= rho(a) + rho(b) on [0, range]^2.
template <class Potential>
SubadditivityReport check_subadditivity(const Potential& rho, std::size_t samples, double range,
                                        std::uint64_t seed = 0x5eed5eedULL) {
    SubadditivityReport rep;
    rep.samples = samples;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, range);
    for (std::size_t i = 0; i < samples; ++i) {
        const double a = uni(rng);
        const double b = uni(rng);
        const double lhs = rho.eval(a + b);
        const double rhs = rho.eval(a) + rho.eval(b);
        if (lhs > rhs + 1e-12) {
            rep.passed = false;
            rep.a = a;
            rep.b = b;
            rep.lhs = lhs;
            rep.rhs = rhs;
            return rep;
        }
    }
    return rep;
}

}  // namespace treg
