#pragma once

// Experiment pipeline: degradation simulation, PSNR, a single restoration
// run (degrade -> ADMM -> metrics), and parameter sweeps.  Noise levels
// follow the 8-bit convention: sigma is quoted on [0,255] and divided by
// 255 internally, since images are carried in [0,1].

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "treg/admm.hpp"
#include "treg/config.hpp"
#include "treg/errors.hpp"
#include "treg/grid_ops.hpp"
#include "treg/image.hpp"

namespace treg {

// f = A u + n with n iid N(0, (sigma/255)^2), from a seeded generator.
// The observation is intentionally not clipped to [0,1]: the model assumes
// additive Gaussian noise and clipping would bias the fidelity term.
inline Image2D degrade(const Image2D& u, const BlurKernel* blur, double sigma_255,
                       std::uint64_t seed) {
    if (sigma_255 < 0.0) throw ConfigError("degrade: sigma must be nonnegative");
    Image2D f = (blur != nullptr) ? convolve(u, *blur) : u;
    if (sigma_255 > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> noise(0.0, sigma_255 / 255.0);
        for (std::size_t k = 0; k < f.size(); ++k) f[k] += noise(rng);
    }
    return f;
}

// 10 log10(1 / MSE) against peak 1; identical images give +inf.
inline double psnr(const Image2D& u, const Image2D& ref) {
    check_same_shape(u, ref, "psnr");
    double mse = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double d = u[k] - ref[k];
        mse += d * d;
    }
    mse /= static_cast<double>(u.size());
    if (mse == 0.0) return kInf;
    return 10.0 * std::log10(1.0 / mse);
}

enum class Task : std::uint8_t { Denoise, Deblur, Sweep, Verify1D };

struct RunConfig {
    Task task = Task::Denoise;
    std::string input;            // clean image path, or "phantom:<name>"
    std::size_t phantom_size = 256;
    std::string out_dir;
    double sigma = 0.0;           // noise std on the 0-255 scale
    std::optional<std::pair<std::size_t, double>> blur;  // (size, sigma)
    std::string reg_text = "tr-l1";
    double alpha = 0.0;
    double beta = 0.0;
    double tau = std::numeric_limits<double>::quiet_NaN();
    AdmmMode mode = AdmmMode::Isotropic;
    std::uint64_t seed = 0;
    std::size_t max_iters = 2000;
    double tol = 5e-5;
    bool and_stop = false;
    bool return_final = false;

    void validate() const {
        if (task == Task::Deblur && !blur)
            throw ConfigError("deblur requires a blur kernel spec");
        if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
        if (!(beta > 0.0)) throw ConfigError("beta must be positive");
        if (sigma < 0.0) throw ConfigError("sigma must be nonnegative");
    }

    AdmmConfig admm() const {
        AdmmConfig c;
        c.alpha = alpha;
        c.beta = beta;
        c.reg = parse_regularizer(reg_text, tau);
        c.mode = mode;
        c.max_iters = max_iters;
        c.tol = tol;
        c.seed = seed;
        c.and_stop = and_stop;
        c.return_final = return_final;
        return c;
    }

    OperatorSpec op() const {
        if (!blur) return OperatorSpec::identity();
        return OperatorSpec::blur(gaussian_kernel(blur->first, blur->second));
    }
};

struct MetricsReport {
    double psnr_db = 0.0;
    double psnr_degraded_db = 0.0;
    std::size_t iterations = 0;
    double wall_time_s = 0.0;
    bool converged = false;
    double final_rel_u_mean = 0.0;
    double final_rel_q_gap = 0.0;
    KktReport kkt;

    void to_csv(std::ostream& os) const {
        os << "psnr_db,psnr_degraded_db,iterations,wall_time_s,converged,"
              "final_rel_u_mean,final_rel_q_gap,kkt_rel_gap,kkt_rel_stationarity\n";
        os << psnr_db << ',' << psnr_degraded_db << ',' << iterations << ',' << wall_time_s
           << ',' << (converged ? 1 : 0) << ',' << final_rel_u_mean << ',' << final_rel_q_gap
           << ',' << kkt.rel_gap << ',' << kkt.rel_stationarity << '\n';
    }
};

struct RunOutputs {
    Image2D degraded;
    Image2D restored;
    AdmmResult admm;
    MetricsReport metrics;
};

// Degrade the clean image per the config, restore it, and collect metrics.
inline RunOutputs run_restoration(const Image2D& clean, const RunConfig& cfg) {
    cfg.validate();
    const OperatorSpec A = cfg.op();
    const BlurKernel* blur = A.is_identity() ? nullptr : &A.kernel;

    RunOutputs out;
    out.degraded = degrade(clean, blur, cfg.sigma, cfg.seed);

    const auto t0 = std::chrono::steady_clock::now();
    out.admm = run_admm(out.degraded, A, cfg.admm());
    const auto t1 = std::chrono::steady_clock::now();

    out.restored = out.admm.u;
    out.metrics.psnr_db = psnr(out.restored, clean);
    out.metrics.psnr_degraded_db = psnr(out.degraded, clean);
    out.metrics.iterations = out.admm.iters;
    out.metrics.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
    out.metrics.converged = out.admm.converged;
    if (out.admm.iters > 0) {
        out.metrics.final_rel_u_mean = out.admm.trace.rel_u_mean.back();
        out.metrics.final_rel_q_gap = out.admm.trace.rel_q_gap.back();
    }
    out.metrics.kkt = out.admm.kkt;
    return out;
}

// --- Parameter sweeps ------------------------------------------------------

struct SweepRow {
    double value = 0.0;
    double psnr_db = 0.0;
    std::size_t iterations = 0;
};

struct SweepResult {
    std::string param;
    std::vector<SweepRow> rows;

    void to_csv(std::ostream& os) const {
        os << param << ",psnr_db,iterations\n";
        for (const SweepRow& r : rows)
            os << r.value << ',' << r.psnr_db << ',' << r.iterations << '\n';
    }

    std::size_t argmax() const {
        std::size_t best = 0;
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (rows[i].psnr_db > rows[best].psnr_db) best = i;
        return best;
    }
};

// Runs the base config once per value of `param` (one of alpha, beta, tau).
// The degraded observation is generated once from the base config and
// reused, so rows differ only in the swept parameter.
inline SweepResult sweep(const Image2D& clean, RunConfig base, const std::string& param,
                         const std::vector<double>& values) {
    if (values.empty()) throw ConfigError("sweep: empty value grid");
    const OperatorSpec A = base.op();
    const BlurKernel* blur = A.is_identity() ? nullptr : &A.kernel;
    const Image2D degraded = degrade(clean, blur, base.sigma, base.seed);

    SweepResult result;
    result.param = param;
    for (double v : values) {
        RunConfig cfg = base;
        if (param == "alpha")
            cfg.alpha = v;
        else if (param == "beta")
            cfg.beta = v;
        else if (param == "tau")
            cfg.tau = v;
        else
            throw ConfigError("sweep: unknown parameter '" + param +
                              "' (expected alpha, beta, or tau)");
        cfg.validate();
        const AdmmResult r = run_admm(degraded, A, cfg.admm());
        SweepRow row;
        row.value = v;
        row.psnr_db = psnr(r.u, clean);
        row.iterations = r.iters;
        result.rows.push_back(row);
    }
    return result;
}

}  // namespace treg
