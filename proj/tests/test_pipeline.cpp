#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "treg/io.hpp"
#include "treg/phantom.hpp"
#include "treg/pipeline.hpp"

using namespace treg;
using Catch::Approx;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& p) : path(p) {}
    ~TempFile() { std::remove(path.c_str()); }
};

Image2D random_u8_image(std::size_t m, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> byte(0, 255);
    Image2D img(m, n);
    for (std::size_t k = 0; k < img.size(); ++k)
        img[k] = static_cast<double>(byte(rng)) / 255.0;
    return img;
}

}  // namespace

TEST_CASE("psnr", "[pipeline]") {
    Image2D a(8, 8, 0.3);
    CHECK(std::isinf(psnr(a, a)));

    Image2D b = a;
    for (std::size_t k = 0; k < b.size(); ++k) b[k] += 0.1;  // MSE = 0.01
    CHECK(psnr(a, b) == Approx(20.0).margin(1e-9));

    Image2D checker(8, 8), zero(8, 8, 0.0);
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) checker(i, j) = ((i + j) % 2 == 0) ? 1.0 : 0.0;
    CHECK(psnr(checker, zero) == Approx(3.010299956639812).margin(1e-12));  // MSE = 1/2

    CHECK_THROWS_AS(psnr(a, Image2D(8, 9)), DomainError);
}

TEST_CASE("degradation model", "[pipeline]") {
    const Image2D clean = shepp_logan(64);

    SECTION("noise-free identity is a no-op") {
        const Image2D f = degrade(clean, nullptr, 0.0, 3);
        for (std::size_t k = 0; k < f.size(); ++k) CHECK(f[k] == clean[k]);
    }
    SECTION("noise-free blur is plain convolution") {
        const BlurKernel k = gaussian_kernel(5, 1.5);
        const Image2D f = degrade(clean, &k, 0.0, 3);
        const Image2D g = convolve(clean, k);
        for (std::size_t i = 0; i < f.size(); ++i) CHECK(f[i] == g[i]);
    }
    SECTION("seeded noise is reproducible") {
        const Image2D f1 = degrade(clean, nullptr, 25.0, 42);
        const Image2D f2 = degrade(clean, nullptr, 25.0, 42);
        const Image2D f3 = degrade(clean, nullptr, 25.0, 43);
        CHECK(diff_norm(f1, f2) == 0.0);
        CHECK(diff_norm(f1, f3) > 0.0);
    }
    SECTION("noise statistics on the 0-255 convention") {
        const Image2D f = degrade(clean, nullptr, 25.0, 0);
        double mean = 0.0;
        for (std::size_t k = 0; k < f.size(); ++k) mean += f[k] - clean[k];
        mean /= static_cast<double>(f.size());
        double var = 0.0;
        for (std::size_t k = 0; k < f.size(); ++k) {
            const double d = f[k] - clean[k] - mean;
            var += d * d;
        }
        var /= static_cast<double>(f.size());
        CHECK(std::fabs(mean) <= 0.01);
        CHECK(std::sqrt(var) == Approx(25.0 / 255.0).margin(0.01));
    }
    SECTION("the observation is not clipped") {
        const Image2D f = degrade(clean, nullptr, 25.0, 0);
        bool below = false;
        for (std::size_t k = 0; k < f.size(); ++k) below = below || f[k] < 0.0;
        CHECK(below);  // sky pixels are 0, noise goes negative
    }
    SECTION("negative sigma is rejected") {
        CHECK_THROWS_AS(degrade(clean, nullptr, -1.0, 0), ConfigError);
    }
}

TEST_CASE("8-bit quantization", "[pipeline][io]") {
    CHECK(quantize_u8(0.0) == 0);
    CHECK(quantize_u8(1.0) == 255);
    CHECK(quantize_u8(0.5) == 128);  // 127.5 + 0.5 rounds up
    CHECK(quantize_u8(-0.3) == 0);
    CHECK(quantize_u8(1.7) == 255);
    CHECK(quantize_u8(1.0 / 255.0) == 1);
}

TEST_CASE("image round trips", "[io]") {
    const Image2D img = random_u8_image(9, 13, 77);

    SECTION("binary pgm") {
        TempFile t("/tmp/treg_roundtrip.pgm");
        save_image(img, t.path);
        const Image2D back = load_image(t.path);
        REQUIRE(back.rows() == 9);
        REQUIRE(back.cols() == 13);
        for (std::size_t k = 0; k < img.size(); ++k) CHECK(back[k] == img[k]);
    }
    SECTION("png") {
        TempFile t("/tmp/treg_roundtrip.png");
        save_image(img, t.path);
        const Image2D back = load_image(t.path);
        REQUIRE(back.rows() == 9);
        REQUIRE(back.cols() == 13);
        for (std::size_t k = 0; k < img.size(); ++k) CHECK(back[k] == img[k]);
    }
    SECTION("extreme values survive") {
        Image2D flat(4, 4, 0.0);
        TempFile t("/tmp/treg_flat.pgm");
        save_image(flat, t.path);
        Image2D back = load_image(t.path);
        for (std::size_t k = 0; k < back.size(); ++k) CHECK(back[k] == 0.0);
        Image2D white(4, 4, 1.0);
        save_image(white, t.path);
        back = load_image(t.path);
        for (std::size_t k = 0; k < back.size(); ++k) CHECK(back[k] == 1.0);
    }
}

TEST_CASE("ascii pgm with comments and small maxval", "[io]") {
    TempFile t("/tmp/treg_ascii.pgm");
    {
        std::ofstream out(t.path);
        out << "P2  # ascii variant\n"
               "# a full-line comment\n"
               "4 2\n"
               "15\n"
               "0 5 10 15\n"
               "15 10 5 0\n";
    }
    const Image2D img = load_image(t.path);
    REQUIRE(img.rows() == 2);
    REQUIRE(img.cols() == 4);
    CHECK(img(0, 0) == 0.0);
    CHECK(img(0, 1) == 5.0 / 15.0);
    CHECK(img(0, 3) == 1.0);
    CHECK(img(1, 0) == 1.0);
    CHECK(img(1, 2) == 5.0 / 15.0);
}

TEST_CASE("io failure modes", "[io]") {
    const auto write_file = [](const std::string& path, const std::string& text) {
        std::ofstream out(path, std::ios::binary);
        out << text;
    };

    SECTION("unknown magic") {
        TempFile t("/tmp/treg_bad_magic.pgm");
        write_file(t.path, "P7\n2 2\n255\n....");
        CHECK_THROWS_AS(load_image(t.path), IoError);
    }
    SECTION("truncated raster") {
        TempFile t("/tmp/treg_truncated.pgm");
        write_file(t.path, "P5\n4 4\n255\nabc");
        CHECK_THROWS_AS(load_image(t.path), IoError);
    }
    SECTION("16-bit pgm is rejected") {
        TempFile t("/tmp/treg_16bit.pgm");
        write_file(t.path, "P5\n2 2\n65535\nxxxxxxxx");
        CHECK_THROWS_AS(load_image(t.path), IoError);
    }
    SECTION("sample above maxval") {
        TempFile t("/tmp/treg_over.pgm");
        write_file(t.path, "P2\n2 1\n10\n5 11\n");
        CHECK_THROWS_AS(load_image(t.path), IoError);
    }
    SECTION("unsupported extensions") {
        CHECK_THROWS_AS(load_image("/tmp/treg_nope.jpg"), IoError);
        CHECK_THROWS_AS(save_image(Image2D(2, 2, 0.0), "/tmp/treg_nope.jpg"), IoError);
    }
    SECTION("missing file") {
        CHECK_THROWS_AS(load_image("/tmp/treg_does_not_exist.pgm"), IoError);
    }
}

TEST_CASE("phantoms", "[phantom]") {
    SECTION("shepp-logan probes") {
        const Image2D p = shepp_logan(256);
        CHECK(p(128, 128) == Approx(0.2).margin(1e-12));
        CHECK(p(64, 128) == Approx(0.3).margin(1e-12));
        CHECK(p(20, 20) == Approx(0.0).margin(1e-12));
        CHECK(p(40, 128) == Approx(0.2).margin(1e-12));
        double lo = 1.0, hi = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            lo = std::min(lo, p[k]);
            hi = std::max(hi, p[k]);
        }
        CHECK(lo >= 0.0);
        CHECK(hi <= 1.0);
        CHECK_THROWS_AS(shepp_logan(1), ConfigError);
    }
    SECTION("qrcode is binary and deterministic") {
        const Image2D a = qrcode_phantom(64);
        const Image2D b = qrcode_phantom(64);
        CHECK(diff_norm(a, b) == 0.0);
        for (std::size_t k = 0; k < a.size(); ++k) CHECK((a[k] == 0.0 || a[k] == 1.0));
        CHECK_THROWS_AS(qrcode_phantom(31), ConfigError);
    }
    SECTION("satellite is deterministic and in range") {
        const Image2D a = satellite_phantom(135);
        const Image2D b = satellite_phantom(135);
        CHECK(diff_norm(a, b) == 0.0);
        double lo = 1.0, hi = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            lo = std::min(lo, a[k]);
            hi = std::max(hi, a[k]);
        }
        CHECK(lo >= 0.0);
        CHECK(hi <= 1.0);
        CHECK(hi - lo > 0.5);  // sky vs dish
        CHECK_THROWS_AS(satellite_phantom(8), ConfigError);
    }
    SECTION("name dispatch") {
        CHECK(make_phantom("shepp-logan", 32).rows() == 32);
        CHECK(make_phantom("shepp_logan", 32).rows() == 32);
        CHECK(make_phantom("qrcode", 32).rows() == 32);
        CHECK(make_phantom("satellite", 32).rows() == 32);
        CHECK_THROWS_AS(make_phantom("moon", 32), ConfigError);
    }
}

TEST_CASE("regularizer spec parsing", "[config]") {
    SECTION("canonical names") {
        CHECK(parse_reg_spec("l1").canonical == "l1");
        CHECK(parse_reg_spec("tv").canonical == "l1");  // alias
        CHECK(parse_reg_spec("l2").canonical == "l2");
        CHECK(parse_reg_spec("lp:0.5").canonical == "lp");
        CHECK(parse_reg_spec("log:10").canonical == "log");
        CHECK(parse_reg_spec("ln:10").canonical == "log");  // alias
        CHECK(parse_reg_spec("frac:10").canonical == "frac");
        CHECK(parse_reg_spec("logp:10,0.5").canonical == "logp");
        CHECK(parse_reg_spec("fracp:10,0.5").canonical == "fracp");
        CHECK(parse_reg_spec("zeroone").canonical == "zeroone");
        CHECK(parse_reg_spec("01").canonical == "zeroone");
        CHECK(parse_reg_spec("scad:1").canonical == "scad");
        CHECK_FALSE(parse_reg_spec("l1").truncated);
    }
    SECTION("truncation prefixes") {
        CHECK(parse_reg_spec("tr-l1").canonical == "tr-l1");
        CHECK(parse_reg_spec("TR-L1").canonical == "tr-l1");
        CHECK(parse_reg_spec("tr_lp:0.5").canonical == "tr-lp");
        CHECK(parse_reg_spec("trlog:10").canonical == "tr-log");
        CHECK(parse_reg_spec("tr-tv").canonical == "tr-l1");
        CHECK(parse_reg_spec("tr-l1").truncated);
    }
    SECTION("rejected specs") {
        CHECK_THROWS_AS(parse_reg_spec("tr-zeroone"), ConfigError);
        CHECK_THROWS_AS(parse_reg_spec("tr-scad:1"), ConfigError);
        CHECK_THROWS_AS(parse_reg_spec("lp"), ConfigError);        // missing p
        CHECK_THROWS_AS(parse_reg_spec("l1:3"), ConfigError);      // unexpected param
        CHECK_THROWS_AS(parse_reg_spec("lp:abc"), ConfigError);
        CHECK_THROWS_AS(parse_reg_spec("logp:10"), ConfigError);   // needs theta,p
        CHECK_THROWS_AS(parse_reg_spec("unknown"), ConfigError);
        CHECK_THROWS_AS(parse_reg_spec("tr"), ConfigError);
    }
    SECTION("tau pairing") {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        const TruncatedPotential t = parse_regularizer("tr-l1", 0.4);
        CHECK(t.truncated());
        CHECK(t.tau() == 0.4);
        CHECK(t.eval(1.0) == 0.4);

        const TruncatedPotential u = parse_regularizer("lp:0.5", nan);
        CHECK_FALSE(u.truncated());
        CHECK(u.eval(4.0) == Approx(2.0).margin(1e-14));

        // scad's second parameter defaults to 3.7
        CHECK(parse_regularizer("scad:1", nan).eval(10.0) == Approx(2.35).margin(1e-14));
        CHECK(parse_regularizer("scad:1,3", nan).eval(10.0) == Approx(2.0).margin(1e-14));

        CHECK_THROWS_AS(parse_regularizer("tr-l1", nan), ConfigError);  // tau required
        CHECK_THROWS_AS(parse_regularizer("l1", 0.4), ConfigError);     // tau forbidden
    }
}

TEST_CASE("config file parsing", "[config]") {
    std::istringstream in(
        "# top-level comment\n"
        "top = 1.5\n"
        "[run]\n"
        "task = denoise   ; trailing comment\n"
        "alpha = 10\n"
        "flag = true\n"
        "off_flag = off\n"
        "vals = 1, 2.5, 3\n"
        "name = shepp-logan\n");
    const ConfigFile cf = ConfigFile::parse(in);

    CHECK(cf.get_double("", "top") == 1.5);
    CHECK(cf.get_string("run", "task") == "denoise");
    CHECK(cf.get_double("run", "alpha") == 10.0);
    CHECK(cf.get_int("run", "alpha") == 10);
    CHECK(cf.get_bool("run", "flag"));
    CHECK_FALSE(cf.get_bool("run", "off_flag"));
    CHECK((cf.get_double_list("run", "vals") == std::vector<double>{1.0, 2.5, 3.0}));
    CHECK(cf.has("run", "name"));
    CHECK_FALSE(cf.has("run", "absent"));
    CHECK(cf.get_double_or("run", "absent", 7.5) == 7.5);
    CHECK(cf.get_string_or("run", "absent", "x") == "x");
    CHECK(cf.get_int_or("run", "absent", 4) == 4);

    CHECK_THROWS_AS(cf.get_string("run", "absent"), ConfigError);

    SECTION("typed errors") {
        std::istringstream bad(
            "x = 1.5\n"
            "s = abc\n"
            "b = maybe\n"
            "empty_list = ,\n");
        const ConfigFile c = ConfigFile::parse(bad);
        CHECK_THROWS_AS(c.get_int("", "x"), ConfigError);     // not an integer
        CHECK_THROWS_AS(c.get_double("", "s"), ConfigError);
        CHECK_THROWS_AS(c.get_bool("", "b"), ConfigError);
        CHECK_THROWS_AS(c.get_double_list("", "empty_list"), ConfigError);
    }
    SECTION("syntax errors") {
        std::istringstream bad1("[run\nalpha = 1\n");
        CHECK_THROWS_AS(ConfigFile::parse(bad1), ConfigError);
        std::istringstream bad2("alpha 1\n");
        CHECK_THROWS_AS(ConfigFile::parse(bad2), ConfigError);
        std::istringstream bad3("= 5\n");
        CHECK_THROWS_AS(ConfigFile::parse(bad3), ConfigError);
    }
    SECTION("missing file") {
        CHECK_THROWS_AS(ConfigFile::parse_file("/tmp/treg_no_such.conf"), ConfigError);
    }
}

TEST_CASE("metrics and sweep serialization", "[pipeline]") {
    SECTION("metrics csv header") {
        MetricsReport r;
        r.psnr_db = 30.5;
        std::ostringstream os;
        r.to_csv(os);
        std::istringstream is(os.str());
        std::string line;
        REQUIRE(std::getline(is, line));
        CHECK(line ==
              "psnr_db,psnr_degraded_db,iterations,wall_time_s,converged,"
              "final_rel_u_mean,final_rel_q_gap,kkt_rel_gap,kkt_rel_stationarity");
        REQUIRE(std::getline(is, line));
        CHECK(line.rfind("30.5,", 0) == 0);
    }
    SECTION("sweep csv and argmax") {
        SweepResult s;
        s.param = "alpha";
        s.rows = {{1.0, 20.0, 10}, {2.0, 22.0, 9}, {3.0, 21.0, 8}};
        std::ostringstream os;
        s.to_csv(os);
        std::istringstream is(os.str());
        std::string line;
        REQUIRE(std::getline(is, line));
        CHECK(line == "alpha,psnr_db,iterations");
        CHECK(s.argmax() == 1);
    }
}

TEST_CASE("run config validation", "[pipeline]") {
    RunConfig cfg;
    cfg.task = Task::Denoise;
    cfg.alpha = 10.0;
    cfg.beta = 20.0;
    cfg.tau = 0.4;
    cfg.sigma = 25.0;
    CHECK_NOTHROW(cfg.validate());

    RunConfig bad = cfg;
    bad.task = Task::Deblur;  // no blur kernel given
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.alpha = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.beta = -1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.sigma = -5.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    SECTION("admm and operator assembly") {
        const AdmmConfig ac = cfg.admm();
        CHECK(ac.alpha == 10.0);
        CHECK(ac.reg.truncated());
        CHECK(ac.reg.tau() == 0.4);
        CHECK(cfg.op().is_identity());

        RunConfig blurred = cfg;
        blurred.blur = {5, 1.5};
        CHECK_FALSE(blurred.op().is_identity());
        CHECK(blurred.op().kernel.size == 5);

        RunConfig no_tau = cfg;
        no_tau.tau = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(no_tau.admm(), ConfigError);  // tr-l1 needs tau
    }
}

TEST_CASE("restoration runs are reproducible", "[pipeline][slow]") {
    const Image2D clean = shepp_logan(32);
    RunConfig cfg;
    cfg.task = Task::Denoise;
    cfg.sigma = 15.0;
    cfg.seed = 7;
    cfg.reg_text = "tr-l1";
    cfg.alpha = 8.0;
    cfg.beta = 16.0;
    cfg.tau = 0.4;
    cfg.tol = 1e-3;
    cfg.max_iters = 200;

    const RunOutputs a = run_restoration(clean, cfg);
    const RunOutputs b = run_restoration(clean, cfg);
    CHECK(diff_norm(a.restored, b.restored) == 0.0);
    CHECK(a.metrics.psnr_db == b.metrics.psnr_db);
    CHECK(a.metrics.psnr_degraded_db == psnr(a.degraded, clean));
    CHECK(a.metrics.iterations == a.admm.iters);
    CHECK(a.metrics.psnr_db > a.metrics.psnr_degraded_db);  // denoising helps here

    SECTION("deblur path") {
        RunConfig dcfg = cfg;
        dcfg.task = Task::Deblur;
        dcfg.blur = {5, 1.5};
        dcfg.sigma = 2.0;
        dcfg.alpha = 400.0;
        dcfg.beta = 200.0;
        dcfg.tau = 0.5;
        dcfg.max_iters = 120;
        const RunOutputs d = run_restoration(clean, dcfg);
        CHECK(d.restored.rows() == 32);
        CHECK(d.metrics.iterations > 0);
    }
}

TEST_CASE("parameter sweeps", "[pipeline][slow]") {
    const Image2D clean = shepp_logan(32);
    RunConfig base;
    base.task = Task::Denoise;
    base.sigma = 15.0;
    base.seed = 3;
    base.reg_text = "tr-l1";
    base.alpha = 8.0;
    base.beta = 16.0;
    base.tau = 0.4;
    base.tol = 1e-3;
    base.max_iters = 80;

    SECTION("repeated values give identical rows") {
        const SweepResult s = sweep(clean, base, "alpha", {8.0, 8.0});
        REQUIRE(s.rows.size() == 2);
        CHECK(s.rows[0].psnr_db == s.rows[1].psnr_db);
        CHECK(s.rows[0].iterations == s.rows[1].iterations);
    }
    SECTION("tau actually varies the outcome") {
        const SweepResult s = sweep(clean, base, "tau", {0.2, 0.6});
        REQUIRE(s.rows.size() == 2);
        CHECK(s.rows[0].psnr_db != s.rows[1].psnr_db);
    }
    SECTION("bad sweep requests") {
        CHECK_THROWS_AS(sweep(clean, base, "gamma", {1.0}), ConfigError);
        CHECK_THROWS_AS(sweep(clean, base, "alpha", {}), ConfigError);
    }
}
