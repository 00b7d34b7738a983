#pragma once

// 1D truncated-regularization model
//
//     E(u) = sum_i T(|(grad u)_i|) + alpha/2 ||A(u - f)||^2
//
// with a dynamic-programming global-minimization oracle on quantized
// levels, plus executable forms of the recovery/structure theory:
// recovery threshold, minimizer-structure checks (extremum principle,
// jump-subset, monotonicity), the contrast-reduction witness for
// untruncated potentials, and the noise-robustness probability bound.
//
// Boundary handling: Neumann drops the last difference; Periodic adds the
// wrap term.  The jump set of a signal is computed with the same choice.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "treg/errors.hpp"
#include "treg/potentials.hpp"

namespace treg {

enum class Boundary1D : std::uint8_t { Neumann, Periodic };

// The measurement operator enters only through A^T A (fidelity, mu_min)
// and column norms (probability bound), so three specs suffice: identity,
// diagonal A^T A, and an explicit dense matrix.
struct MatrixSpec {
    enum class Kind : std::uint8_t { Identity, DiagonalNormal, Explicit };
    Kind kind = Kind::Identity;
    std::vector<double> diag;                 // d with A^T A = diag(d), d_i > 0
    std::vector<std::vector<double>> dense;   // K rows of length N

    static MatrixSpec identity() { return MatrixSpec{}; }

    static MatrixSpec diagonal_normal(std::vector<double> d) {
        for (double v : d)
            if (!(v > 0.0))
                throw ConfigError("MatrixSpec: diagonal-normal entries must be positive");
        MatrixSpec s;
        s.kind = Kind::DiagonalNormal;
        s.diag = std::move(d);
        return s;
    }

    static MatrixSpec explicit_matrix(std::vector<std::vector<double>> rows) {
        if (rows.empty() || rows.front().empty())
            throw ConfigError("MatrixSpec: explicit matrix must be nonempty");
        const std::size_t n = rows.front().size();
        for (const auto& r : rows)
            if (r.size() != n) throw ConfigError("MatrixSpec: ragged explicit matrix");
        MatrixSpec s;
        s.kind = Kind::Explicit;
        s.dense = std::move(rows);
        return s;
    }

    bool is_chain_compatible() const { return kind != Kind::Explicit; }

    std::size_t cols() const {
        switch (kind) {
            case Kind::Identity: return 0;  // any size
            case Kind::DiagonalNormal: return diag.size();
            case Kind::Explicit: return dense.front().size();
        }
        return 0;
    }

    void check_size(std::size_t n, const char* where) const {
        const std::size_t c = cols();
        if (c != 0 && c != n) throw DomainError(std::string(where) + ": matrix/signal size mismatch");
    }

    // d_i = (A^T A)_{ii} for the chain cases.
    double node_weight(std::size_t i) const {
        switch (kind) {
            case Kind::Identity: return 1.0;
            case Kind::DiagonalNormal: return diag[i];
            case Kind::Explicit:
                throw UnsupportedOracleError("MatrixSpec: explicit matrix has no chain weights");
        }
        return 1.0;
    }

    // ||A r||^2.
    double quad(const std::vector<double>& r) const {
        check_size(r.size(), "MatrixSpec::quad");
        switch (kind) {
            case Kind::Identity:
                return std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
            case Kind::DiagonalNormal: {
                double s = 0.0;
                for (std::size_t i = 0; i < r.size(); ++i) s += diag[i] * r[i] * r[i];
                return s;
            }
            case Kind::Explicit: {
                double s = 0.0;
                for (const auto& row : dense) {
                    double a = 0.0;
                    for (std::size_t j = 0; j < r.size(); ++j) a += row[j] * r[j];
                    s += a * a;
                }
                return s;
            }
        }
        return 0.0;
    }

    // 2-norm of the i-th column of A.
    double col_norm(std::size_t i) const {
        switch (kind) {
            case Kind::Identity: return 1.0;
            case Kind::DiagonalNormal: return std::sqrt(diag[i]);
            case Kind::Explicit: {
                double s = 0.0;
                for (const auto& row : dense) s += row[i] * row[i];
                return std::sqrt(s);
            }
        }
        return 1.0;
    }

    // Smallest eigenvalue of A^T A (= mu_min of AS5).  Diagonal cases are
    // immediate; explicit matrices go through cyclic Jacobi sweeps.
    double mu_min(std::size_t n) const;
};

namespace detail {

// Smallest eigenvalue of a dense symmetric matrix by cyclic Jacobi
// rotations; plenty for the small explicit operators used in tests.
inline double smallest_eigenvalue_sym(std::vector<std::vector<double>> M, double tol = 1e-10) {
    const std::size_t n = M.size();
    if (n == 0) throw InternalError("smallest_eigenvalue_sym: empty matrix");
    double scale = 0.0;
    for (const auto& row : M)
        for (double v : row) scale = std::max(scale, std::fabs(v));
    if (scale == 0.0) return 0.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::fabs(M[p][q]));
        if (off <= tol * scale) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::fabs(M[p][q]) <= 1e-300) continue;
                const double theta = (M[q][q] - M[p][p]) / (2.0 * M[p][q]);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double mkp = M[k][p], mkq = M[k][q];
                    M[k][p] = c * mkp - s * mkq;
                    M[k][q] = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double mpk = M[p][k], mqk = M[q][k];
                    M[p][k] = c * mpk - s * mqk;
                    M[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    double mn = M[0][0];
    for (std::size_t i = 1; i < n; ++i) mn = std::min(mn, M[i][i]);
    return mn;
}

}  // namespace detail

inline double MatrixSpec::mu_min(std::size_t n) const {
    switch (kind) {
        case Kind::Identity:
            return 1.0;
        case Kind::DiagonalNormal: {
            check_size(n, "MatrixSpec::mu_min");
            return *std::min_element(diag.begin(), diag.end());
        }
        case Kind::Explicit: {
            check_size(n, "MatrixSpec::mu_min");
            const std::size_t nc = dense.front().size();
            std::vector<std::vector<double>> ata(nc, std::vector<double>(nc, 0.0));
            for (const auto& row : dense)
                for (std::size_t i = 0; i < nc; ++i)
                    for (std::size_t j = 0; j < nc; ++j) ata[i][j] += row[i] * row[j];
            return detail::smallest_eigenvalue_sym(std::move(ata));
        }
    }
    return 1.0;
}

struct Signal1DProblem {
    std::vector<double> f;
    MatrixSpec A = MatrixSpec::identity();
    double alpha = 1.0;
    TruncatedPotential reg = TruncatedPotential::untruncated(PotentialFamily::L1());
    Boundary1D boundary = Boundary1D::Neumann;

    std::size_t n() const { return f.size(); }

    void validate() const {
        if (f.size() < 2) throw ConfigError("Signal1DProblem: need at least 2 samples");
        if (!(alpha > 0.0)) throw ConfigError("Signal1DProblem: alpha must be positive");
        A.check_size(f.size(), "Signal1DProblem");
    }
};

// Indicator input zeta * 1_Omega with Omega a proper nonempty subset
// (0-based indices).
struct IndicatorSignal {
    std::size_t n = 0;
    std::vector<std::size_t> omega;
    double zeta = 1.0;

    void validate() const {
        if (n < 2) throw ConfigError("IndicatorSignal: need n >= 2");
        if (omega.empty() || omega.size() >= n)
            throw ConfigError("IndicatorSignal: omega must be a proper nonempty subset");
        for (std::size_t i : omega)
            if (i >= n) throw ConfigError("IndicatorSignal: omega index out of range");
        if (!(zeta > 0.0)) throw ConfigError("IndicatorSignal: zeta must be positive");
    }

    std::vector<double> to_signal() const {
        validate();
        std::vector<double> s(n, 0.0);
        for (std::size_t i : omega) s[i] = zeta;
        return s;
    }

    // J1 = indices i with (grad 1_Omega)_i != 0 under the chosen boundary.
    std::vector<std::size_t> jump_set(Boundary1D b) const {
        const std::vector<double> s = to_signal();
        std::vector<std::size_t> j;
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (s[i + 1] != s[i]) j.push_back(i);
        if (b == Boundary1D::Periodic && s[0] != s[n - 1]) j.push_back(n - 1);
        return j;
    }
};

// The centered gate signal 0^M, zeta^M, 0^M (N = 3M).
inline IndicatorSignal make_gate(std::size_t M, double zeta) {
    if (M == 0) throw ConfigError("make_gate: M must be positive");
    IndicatorSignal g;
    g.n = 3 * M;
    g.zeta = zeta;
    for (std::size_t i = M; i < 2 * M; ++i) g.omega.push_back(i);
    return g;
}

inline double energy_1d(const std::vector<double>& u, const Signal1DProblem& P) {
    P.validate();
    if (u.size() != P.f.size()) throw DomainError("energy_1d: size mismatch");
    double reg_sum = 0.0;
    for (std::size_t i = 0; i + 1 < u.size(); ++i)
        reg_sum += P.reg.eval(std::fabs(u[i + 1] - u[i]));
    if (P.boundary == Boundary1D::Periodic)
        reg_sum += P.reg.eval(std::fabs(u.front() - u.back()));
    std::vector<double> r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = u[i] - P.f[i];
    return reg_sum + 0.5 * P.alpha * P.A.quad(r);
}

// Uniform level grid {lo, ..., hi} with L+1 points; the default oracle grid
// for a gate of height zeta is uniform_levels(0, zeta, 100).  The endpoints
// are pinned exactly so that signals built from lo/hi are on-grid bitwise.
inline std::vector<double> uniform_levels(double lo, double hi, std::size_t segments) {
    if (segments == 0 || !(hi > lo)) throw ConfigError("uniform_levels: bad range");
    std::vector<double> v(segments + 1);
    for (std::size_t k = 0; k <= segments; ++k)
        v[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(segments);
    v.front() = lo;
    v.back() = hi;
    return v;
}

// Exact global minimizer over the quantized level set by dynamic
// programming on the chain: state = level index, node cost
// (alpha/2) d_i (u_i - f_i)^2, transition cost T(|level_a - level_b|).
// Requires A^T A diagonal (identity or diagonal-normal).  Ties are broken
// toward the smaller level index, deterministically.
inline std::vector<double> dp_global_min(const Signal1DProblem& P,
                                         const std::vector<double>& levels) {
    P.validate();
    if (levels.empty()) throw ConfigError("dp_global_min: empty level grid");
    if (!P.A.is_chain_compatible())
        throw UnsupportedOracleError(
            "dp_global_min: explicit matrices break the chain structure; "
            "use exhaustive_global_min for small instances");

    const std::size_t N = P.n();
    const std::size_t L = levels.size();

    // Transition table T(|delta|), symmetric.
    std::vector<double> trans(L * L);
    for (std::size_t a = 0; a < L; ++a)
        for (std::size_t b = 0; b <= a; ++b) {
            const double v = P.reg.eval(std::fabs(levels[a] - levels[b]));
            trans[a * L + b] = v;
            trans[b * L + a] = v;
        }

    const auto node = [&](std::size_t i, std::size_t l) {
        const double d = P.A.node_weight(i);
        const double r = levels[l] - P.f[i];
        return 0.5 * P.alpha * d * r * r;
    };

    const auto solve_chain = [&](std::ptrdiff_t forced_start, std::vector<std::size_t>& path) {
        std::vector<double> prev(L), cur(L);
        std::vector<std::uint32_t> parent((N - 1) * L);
        for (std::size_t l = 0; l < L; ++l) {
            prev[l] = (forced_start >= 0 && l != static_cast<std::size_t>(forced_start))
                          ? std::numeric_limits<double>::infinity()
                          : node(0, l);
        }
        for (std::size_t i = 1; i < N; ++i) {
            for (std::size_t l = 0; l < L; ++l) {
                double best = prev[0] + trans[0 * L + l];
                std::uint32_t arg = 0;
                for (std::size_t lp = 1; lp < L; ++lp) {
                    const double c = prev[lp] + trans[lp * L + l];
                    if (c < best) {
                        best = c;
                        arg = static_cast<std::uint32_t>(lp);
                    }
                }
                cur[l] = best + node(i, l);
                parent[(i - 1) * L + l] = arg;
            }
            std::swap(prev, cur);
        }
        // Close the cycle for periodic boundaries.
        if (P.boundary == Boundary1D::Periodic && forced_start >= 0)
            for (std::size_t l = 0; l < L; ++l)
                prev[l] += trans[static_cast<std::size_t>(forced_start) * L + l];

        std::size_t best_l = 0;
        for (std::size_t l = 1; l < L; ++l)
            if (prev[l] < prev[best_l]) best_l = l;
        path.assign(N, 0);
        path[N - 1] = best_l;
        for (std::size_t i = N - 1; i > 0; --i) path[i - 1] = parent[(i - 1) * L + path[i]];
        return prev[best_l];
    };

    std::vector<std::size_t> path;
    if (P.boundary == Boundary1D::Neumann) {
        solve_chain(-1, path);
    } else {
        // Periodic: condition on the starting level and take the best loop.
        double best = std::numeric_limits<double>::infinity();
        std::vector<std::size_t> trial;
        for (std::size_t l0 = 0; l0 < L; ++l0) {
            const double v = solve_chain(static_cast<std::ptrdiff_t>(l0), trial);
            if (v < best) {
                best = v;
                path = trial;
            }
        }
    }

    std::vector<double> u(N);
    for (std::size_t i = 0; i < N; ++i) u[i] = levels[path[i]];
    return u;
}

// Brute-force enumeration over all level assignments; works for any A.
// Guarded so it cannot be launched on astronomically large products.
inline std::vector<double> exhaustive_global_min(const Signal1DProblem& P,
                                                 const std::vector<double>& levels) {
    P.validate();
    if (levels.empty()) throw ConfigError("exhaustive_global_min: empty level grid");
    const std::size_t N = P.n();
    const std::size_t L = levels.size();
    double states = 1.0;
    for (std::size_t i = 0; i < N; ++i) states *= static_cast<double>(L);
    if (states > 5e7)
        throw ConfigError("exhaustive_global_min: level^n too large to enumerate");

    std::vector<std::size_t> idx(N, 0);
    std::vector<double> u(N, levels[0]), best_u;
    double best = std::numeric_limits<double>::infinity();
    while (true) {
        for (std::size_t i = 0; i < N; ++i) u[i] = levels[idx[i]];
        const double e = energy_1d(u, P);
        if (e < best) {
            best = e;
            best_u = u;
        }
        std::size_t pos = 0;
        while (pos < N && ++idx[pos] == L) {
            idx[pos] = 0;
            ++pos;
        }
        if (pos == N) break;
    }
    return best_u;
}

// Recovery threshold of the exact-recovery theorem:
//     zeta > tau + sqrt(4 T(tau) #J1 / (alpha mu_min)).
// Untruncated potentials give +inf (no finite cap, no recovery claim).
inline double recovery_threshold(const TruncatedPotential& reg, double alpha, double mu_min,
                                 std::size_t j1_count) {
    if (!(alpha > 0.0)) throw ConfigError("recovery_threshold: alpha must be positive");
    if (!(mu_min > 0.0)) throw IllPosedOperatorError("recovery_threshold: mu_min must be positive");
    if (j1_count == 0) throw ConfigError("recovery_threshold: empty jump set");
    if (!reg.truncated()) return kInf;
    return reg.tau() +
           std::sqrt(4.0 * reg.tail_value() * static_cast<double>(j1_count) / (alpha * mu_min));
}

// Structural checks on a candidate minimizer for an indicator input
// (extremum principle, no new jumps, preserved monotonicity).  A small
// tolerance absorbs quantization/solver roundoff.
struct StructureReport {
    bool extremum_ok = true;
    bool jumps_ok = true;
    bool monotone_ok = true;
    std::ptrdiff_t extremum_violation = -1;  // first offending index, -1 if none
    std::ptrdiff_t jump_violation = -1;
    std::ptrdiff_t monotone_violation = -1;

    bool all_ok() const { return extremum_ok && jumps_ok && monotone_ok; }
};

inline StructureReport check_minimizer_structure(const std::vector<double>& u,
                                                 const IndicatorSignal& input,
                                                 Boundary1D boundary, double tol = 1e-9) {
    input.validate();
    if (u.size() != input.n) throw DomainError("check_minimizer_structure: size mismatch");
    const std::vector<double> g = input.to_signal();
    StructureReport rep;

    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] < -tol || u[i] > input.zeta + tol) {
            rep.extremum_ok = false;
            rep.extremum_violation = static_cast<std::ptrdiff_t>(i);
            break;
        }
    }

    const auto pair_count =
        (boundary == Boundary1D::Periodic) ? u.size() : u.size() - 1;
    for (std::size_t i = 0; i < pair_count; ++i) {
        const std::size_t ip = (i + 1) % u.size();
        const double du = u[ip] - u[i];
        const double dg = g[ip] - g[i];
        if (dg == 0.0) {
            if (std::fabs(du) > tol && rep.jumps_ok) {
                rep.jumps_ok = false;
                rep.jump_violation = static_cast<std::ptrdiff_t>(i);
            }
        } else {
            // Monotonicity: the minimizer may not move against the input's
            // jump direction.
            if (dg * du < -tol * std::fabs(dg) && rep.monotone_ok) {
                rep.monotone_ok = false;
                rep.monotone_violation = static_cast<std::ptrdiff_t>(i);
            }
        }
    }
    return rep;
}

// Contrast-reduction witness: for the gate input, tests the family
//     u^eps = (eps, ..., eps, zeta - eps, ..., zeta - eps, eps, ..., eps)
// over eps in {zeta/2, zeta/4, ..., zeta/2^max_powers} and reports the
// first eps with E(u^eps) < E(gate).  For truncated potentials above the
// recovery threshold no witness should exist; that outcome is reported
// with found = false.
struct WitnessResult {
    bool found = false;
    double epsilon = 0.0;
    double gap = 0.0;                 // E(u^eps) - E(gate), negative when found
    std::vector<double> gaps;         // gap per tested eps, largest eps first
};

inline WitnessResult contrast_reduction_witness(const TruncatedPotential& reg,
                                                const IndicatorSignal& gate, double alpha,
                                                const MatrixSpec& A = MatrixSpec::identity(),
                                                int max_powers = 20) {
    gate.validate();
    if (gate.n % 3 != 0) throw ConfigError("contrast_reduction_witness: gate needs n = 3M");
    Signal1DProblem P;
    P.f = gate.to_signal();
    P.A = A;
    P.alpha = alpha;
    P.reg = reg;
    P.boundary = Boundary1D::Neumann;

    const double e0 = energy_1d(P.f, P);
    WitnessResult w;
    std::vector<double> u(gate.n);
    for (int k = 1; k <= max_powers; ++k) {
        const double eps = gate.zeta * std::ldexp(1.0, -k);
        const std::size_t M = gate.n / 3;
        for (std::size_t i = 0; i < gate.n; ++i)
            u[i] = (i >= M && i < 2 * M) ? gate.zeta - eps : eps;
        const double gap = energy_1d(u, P) - e0;
        w.gaps.push_back(gap);
        if (!w.found && gap < 0.0) {
            w.found = true;
            w.epsilon = eps;
            w.gap = gap;
        }
    }
    return w;
}

// --- Noise-robustness probability bound ------------------------------------

// One-dimensional closed interval (possibly unbounded) for sub-differential
// arithmetic.
struct SubdiffInterval {
    double lo = 0.0, hi = 0.0;
    static SubdiffInterval point(double v) { return {v, v}; }
};

// Sub-differential of phi(x) = T(|x|) at x, with T(s) = rho(min(s, tau)):
//   x = 0        -> [-rho'(0+), rho'(0+)]  (possibly the whole line)
//   0 < |x| < tau -> { sign(x) rho'(|x|) }
//   |x| = tau    -> interval between 0 and sign(x) rho'(tau) (kink)
//   |x| > tau    -> { 0 }
inline SubdiffInterval phi_subdiff(const TruncatedPotential& reg, double x) {
    if (x == 0.0) {
        const double g = reg.base().deriv_at_zero_plus();
        return {-g, g};
    }
    const double a = std::fabs(x);
    double lo, hi;
    if (!reg.truncated() || a < reg.tau()) {
        lo = hi = reg.base().deriv(a);
    } else if (a == reg.tau()) {
        lo = 0.0;
        hi = reg.base().deriv(a);
        if (lo > hi) std::swap(lo, hi);
    } else {
        lo = hi = 0.0;
    }
    if (x < 0.0) return {-hi, -lo};
    return {lo, hi};
}

inline double normal_cdf(double x) {
    if (std::isinf(x)) return x > 0.0 ? 1.0 : 0.0;
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

struct ProbabilityBound {
    std::vector<double> p;        // per-index bound P_i
    double min_bound = 1.0;       // min_i P_i  (valid for general A)
    double product_bound = 1.0;   // prod_i P_i (valid for A = I)
    bool product_valid = false;
};

// Per-index recovery probability bounds
//   P_i = Phi( sup D_i / (alpha sigma |a_i|) ) - Phi( inf D_i / (alpha sigma |a_i|) ),
//   D_i = subdiff phi((grad u~)_{i-1}) - subdiff phi((grad u~)_i),
// with Neumann boundary; out-of-range gradient terms contribute {0} (the
// i = 1 and i = N stationarity rows have no left/right difference).
inline ProbabilityBound recovery_probability_bound(const std::vector<double>& u_tilde,
                                                   const MatrixSpec& A,
                                                   const TruncatedPotential& reg, double alpha,
                                                   double sigma) {
    if (u_tilde.size() < 2) throw ConfigError("recovery_probability_bound: need n >= 2");
    if (!(alpha > 0.0)) throw ConfigError("recovery_probability_bound: alpha must be positive");
    if (!(sigma > 0.0)) throw ConfigError("recovery_probability_bound: sigma must be positive");
    A.check_size(u_tilde.size(), "recovery_probability_bound");

    const std::size_t N = u_tilde.size();
    // Sub-differentials at the N-1 Neumann differences; index 0 and N map
    // to the {0} interval.
    const auto diff_subdiff = [&](std::size_t i) -> SubdiffInterval {
        if (i == 0 || i >= N) return SubdiffInterval::point(0.0);
        return phi_subdiff(reg, u_tilde[i] - u_tilde[i - 1]);
    };

    ProbabilityBound out;
    out.p.resize(N);
    out.product_valid = (A.kind == MatrixSpec::Kind::Identity);
    for (std::size_t i = 1; i <= N; ++i) {
        const SubdiffInterval left = diff_subdiff(i - 1);   // at (grad u~)_{i-1}
        const SubdiffInterval right = diff_subdiff(i);      // at (grad u~)_i
        const double lo = left.lo - right.hi;
        const double hi = left.hi - right.lo;
        const double denom = alpha * sigma * A.col_norm(i - 1);
        const double pi = normal_cdf(hi / denom) - normal_cdf(lo / denom);
        out.p[i - 1] = pi;
        out.min_bound = std::min(out.min_bound, pi);
        out.product_bound *= pi;
    }
    return out;
}

}  // namespace treg
