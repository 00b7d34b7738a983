#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "treg/potentials.hpp"

using namespace treg;
using Catch::Approx;

namespace {

// Central finite difference of eval at s.
double fd_deriv(const PotentialFamily& f, double s) {
    const double h = 1e-6 * std::max(1.0, s);
    return (f.eval(s + h) - f.eval(s - h)) / (2.0 * h);
}

double fd_second(const PotentialFamily& f, double s) {
    const double h = 1e-6 * std::max(1.0, s);
    return (f.deriv(s + h) - f.deriv(s - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("pinned potential values", "[potentials]") {
    CHECK(PotentialFamily::L1().eval(0.3) == 0.3);
    CHECK(PotentialFamily::Lp(0.5).eval(4.0) == Approx(2.0).margin(1e-14));
    CHECK(PotentialFamily::Log(10.0).eval(0.5) ==
          Approx(1.791759469228055).margin(1e-14));  // ln 6
    CHECK(PotentialFamily::Frac(10.0).eval(0.5) == Approx(5.0 / 6.0).margin(1e-14));
    CHECK(PotentialFamily::L2().eval(3.0) == 4.5);
    CHECK(PotentialFamily::ZeroOne().eval(0.0) == 0.0);
    CHECK(PotentialFamily::ZeroOne().eval(1e-300) == 1.0);

    // SCAD theta=1, a=3.7: linear piece, middle quadratic, flat tail.
    const PotentialFamily scad = PotentialFamily::Scad(1.0);
    CHECK(scad.a() == 3.7);
    CHECK(scad.eval(0.5) == 0.5);
    CHECK(scad.eval(2.0) == Approx(1.8148148148148149).margin(1e-15));
    CHECK(scad.eval(10.0) == Approx(2.35).margin(1e-15));  // (a+1) theta^2 / 2
    CHECK(scad.eval(3.7) == Approx(2.35).margin(1e-12));   // continuous at a*theta
    CHECK(scad.eval(1.0) == Approx(1.0).margin(1e-15));    // continuous at theta

    // rho(0) = 0 across the catalog.
    for (const auto& f :
         {PotentialFamily::L1(), PotentialFamily::Lp(0.3), PotentialFamily::Log(2.0),
          PotentialFamily::Frac(2.0), PotentialFamily::LogP(2.0, 0.5),
          PotentialFamily::FracP(2.0, 0.5), PotentialFamily::Scad(0.7), PotentialFamily::L2(),
          PotentialFamily::ZeroOne()})
        CHECK(f.eval(0.0) == 0.0);
}

TEST_CASE("derivatives match finite differences", "[potentials]") {
    const std::vector<PotentialFamily> fams = {
        PotentialFamily::L1(),          PotentialFamily::Lp(0.3),
        PotentialFamily::Lp(0.5),       PotentialFamily::Lp(0.8),
        PotentialFamily::Log(0.5),      PotentialFamily::Log(10.0),
        PotentialFamily::Frac(0.5),     PotentialFamily::Frac(10.0),
        PotentialFamily::LogP(2.0, 0.5), PotentialFamily::FracP(2.0, 0.5),
        PotentialFamily::L2(),
    };
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> us(0.1, 5.0);
    for (const auto& f : fams) {
        for (int k = 0; k < 1000; ++k) {
            const double s = us(rng);
            const double d = f.deriv(s);
            const double dd = f.second_deriv(s);
            CHECK(std::fabs(fd_deriv(f, s) - d) <= 1e-5 * std::max(1.0, std::fabs(d)));
            CHECK(std::fabs(fd_second(f, s) - dd) <= 1e-5 * std::max(1.0, std::fabs(dd)));
        }
    }

    // SCAD, away from its two breakpoints.
    const PotentialFamily scad = PotentialFamily::Scad(1.0, 3.7);
    for (double s : {0.3, 0.7, 1.5, 2.8, 3.5, 4.5, 8.0}) {
        CHECK(std::fabs(fd_deriv(scad, s) - scad.deriv(s)) <= 1e-5);
        CHECK(std::fabs(fd_second(scad, s) - scad.second_deriv(s)) <= 1e-5);
    }
}

TEST_CASE("curvature is nonpositive and nondecreasing for the bounded families",
          "[potentials]") {
    const std::vector<PotentialFamily> fams = {PotentialFamily::L1(), PotentialFamily::Lp(0.4),
                                               PotentialFamily::Log(3.0),
                                               PotentialFamily::Frac(3.0)};
    for (const auto& f : fams) {
        REQUIRE(f.has_monotone_curvature());
        double prev = -kInf;
        for (double s = 1e-4; s < 1e3; s *= 1.3) {
            const double c = f.second_deriv(s);
            CHECK(c <= 0.0);
            CHECK(c >= prev - 1e-12 * std::fabs(prev));  // nondecreasing on the log grid
            prev = c;
        }
    }
    CHECK_FALSE(PotentialFamily::LogP(2.0, 0.5).has_monotone_curvature());
    CHECK_FALSE(PotentialFamily::Scad(1.0).has_monotone_curvature());
    CHECK_FALSE(PotentialFamily::L2().has_monotone_curvature());
}

TEST_CASE("one-sided slope at zero", "[potentials]") {
    CHECK(PotentialFamily::L1().deriv_at_zero_plus() == 1.0);
    CHECK(std::isinf(PotentialFamily::Lp(0.5).deriv_at_zero_plus()));
    CHECK(PotentialFamily::Log(7.0).deriv_at_zero_plus() == 7.0);
    CHECK(PotentialFamily::Frac(7.0).deriv_at_zero_plus() == 7.0);
    CHECK(PotentialFamily::Scad(0.4).deriv_at_zero_plus() == 0.4);
    CHECK(std::isinf(PotentialFamily::ZeroOne().deriv_at_zero_plus()));
    CHECK(std::isinf(PotentialFamily::LogP(2.0, 0.5).deriv_at_zero_plus()));
    CHECK(std::isinf(PotentialFamily::FracP(2.0, 0.5).deriv_at_zero_plus()));
    CHECK(PotentialFamily::L2().deriv_at_zero_plus() == 0.0);

    CHECK(PotentialFamily::L2().smooth_at_zero());
    CHECK_FALSE(PotentialFamily::L1().smooth_at_zero());
}

TEST_CASE("domain errors", "[potentials]") {
    CHECK_THROWS_AS(PotentialFamily::L1().eval(-0.1), DomainError);
    CHECK_THROWS_AS(PotentialFamily::L1().deriv(0.0), DomainError);
    CHECK_THROWS_AS(PotentialFamily::Log(2.0).second_deriv(-1.0), DomainError);
    CHECK_THROWS_AS(PotentialFamily::ZeroOne().deriv(0.5), DomainError);
    CHECK_THROWS_AS(PotentialFamily::ZeroOne().second_deriv(0.5), DomainError);
}

TEST_CASE("parameter validation", "[potentials]") {
    CHECK_THROWS_AS(PotentialFamily::Lp(0.0), ConfigError);
    CHECK_THROWS_AS(PotentialFamily::Lp(1.0), ConfigError);
    CHECK_THROWS_AS(PotentialFamily::Lp(-0.5), ConfigError);
    CHECK_THROWS_AS(PotentialFamily::Log(0.0), ConfigError);
    CHECK_THROWS_AS(PotentialFamily::Frac(-1.0), ConfigError);
    CHECK_THROWS_AS(PotentialFamily::LogP(2.0, 1.5), ConfigError);
    CHECK_THROWS_AS(PotentialFamily::FracP(0.0, 0.5), ConfigError);
    CHECK_THROWS_AS(PotentialFamily::Scad(1.0, 2.0), ConfigError);  // a must exceed 2
    CHECK_THROWS_AS(PotentialFamily::Scad(0.0), ConfigError);
    CHECK_NOTHROW(PotentialFamily::Scad(1.0, 2.0001));
}

TEST_CASE("truncation wrapper", "[potentials]") {
    const TruncatedPotential tr(PotentialFamily::Log(10.0), 0.5);
    REQUIRE(tr.truncated());
    CHECK(tr.tau() == 0.5);
    CHECK(tr.tail_value() == Approx(1.791759469228055).margin(1e-14));

    // Flat beyond tau, exactly equal to the tail value.
    for (double s : {0.5, 0.6, 1.0, 100.0, 1e9}) CHECK(tr.eval(s) == tr.tail_value());
    CHECK(tr.eval(0.49) < tr.tail_value());
    CHECK(tr.deriv(0.3) == PotentialFamily::Log(10.0).deriv(0.3));
    CHECK(tr.deriv(0.5) == PotentialFamily::Log(10.0).deriv(0.5));  // left value at the kink
    CHECK(tr.deriv(0.51) == 0.0);
    CHECK(tr.deriv_at_zero_plus() == 10.0);

    // Untruncated wrapper degenerates to the base family, bit for bit.
    const TruncatedPotential un = TruncatedPotential::untruncated(PotentialFamily::Lp(0.5));
    REQUIRE_FALSE(un.truncated());
    CHECK(std::isinf(un.tail_value()));
    for (double s : {0.0, 0.3, 2.0, 77.0}) CHECK(un.eval(s) == PotentialFamily::Lp(0.5).eval(s));

    CHECK_THROWS_AS(TruncatedPotential(PotentialFamily::L1(), 0.0), ConfigError);
    CHECK_THROWS_AS(TruncatedPotential(PotentialFamily::L1(), -1.0), ConfigError);
    CHECK_THROWS_AS(
        TruncatedPotential(PotentialFamily::L1(), std::numeric_limits<double>::quiet_NaN()),
        ConfigError);
    CHECK_THROWS_AS(TruncatedPotential(PotentialFamily::L1(), 0.5).deriv(0.0), DomainError);
}

TEST_CASE("subadditivity of the concave potentials", "[potentials]") {
    // T(a+b) <= T(a) + T(b) is what licenses the jump-splitting arguments.
    const auto r1 = check_subadditivity(TruncatedPotential(PotentialFamily::L1(), 1.0), 10000, 5.0);
    CHECK(r1.passed);
    CHECK(r1.samples == 10000);

    CHECK(check_subadditivity(PotentialFamily::Scad(1.0, 3.7), 10000, 10.0).passed);
    CHECK(check_subadditivity(TruncatedPotential(PotentialFamily::Lp(0.5), 0.8), 10000, 5.0)
              .passed);
    CHECK(check_subadditivity(TruncatedPotential(PotentialFamily::Frac(10.0), 0.5), 10000, 5.0)
              .passed);

    // The convex quadratic is not subadditive; the checker must find a
    // counterexample and report it coherently.
    const auto r2 = check_subadditivity(PotentialFamily::L2(), 10000, 5.0);
    REQUIRE_FALSE(r2.passed);
    CHECK(r2.lhs > r2.rhs);
    CHECK(PotentialFamily::L2().eval(r2.a + r2.b) == r2.lhs);
}

TEST_CASE("names and descriptions", "[potentials]") {
    CHECK(std::string(family_name(FamilyKind::L1)) == "l1");
    CHECK(std::string(family_name(FamilyKind::Scad)) == "scad");
    CHECK(PotentialFamily::L1().describe() == "l1");
    CHECK(PotentialFamily::Lp(0.5).describe().find("lp(p=") == 0);
    CHECK(TruncatedPotential(PotentialFamily::L1(), 0.4).describe().find("tr-l1@tau=") == 0);
    CHECK(TruncatedPotential::untruncated(PotentialFamily::L1()).describe() == "l1");
}
