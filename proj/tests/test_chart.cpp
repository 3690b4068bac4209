#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "lowner/chart.hpp"

using namespace lowner;

namespace {
WittField l(int n, double c = 1.0) { return WittField::mode(n, c); }
}

TEST_CASE("disk transition endpoints") {
    CPoint origin = transition(Chart::Disk, Chart::HalfPlane, 1.0);
    CHECK(!origin.at_infinity);
    CHECK(std::abs(origin.value) < 1e-15);
    CPoint inf = transition(Chart::Disk, Chart::HalfPlane, -1.0);
    CHECK(inf.at_infinity);
    CPoint strip0 = transition(Chart::Strip, Chart::HalfPlane, 0.0);
    CHECK(std::abs(strip0.value) < 1e-15);
}

TEST_CASE("round trips on interior grids") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> ux(-0.7, 0.7), uy(0.1, 0.8);
    for (Chart chart : {Chart::Disk, Chart::Strip, Chart::Log}) {
        for (int i = 0; i < 40; ++i) {
            cplx z;
            if (chart == Chart::Disk)
                z = 0.8 * cplx(ux(rng), ux(rng));
            else
                z = cplx(2.0 * ux(rng), (chart == Chart::Strip ? 2.8 : 2.0) * uy(rng));
            CPoint w = transition(chart, Chart::HalfPlane, z);
            REQUIRE(!w.at_infinity);
            CPoint back = transition(Chart::HalfPlane, chart, w.value);
            REQUIRE(!back.at_infinity);
            CHECK(std::abs(back.value - z) < 1e-12);
        }
    }
}

TEST_CASE("fields in charts: closed forms") {
    SUBCASE("l_0 in the half-plane") {
        CHECK(std::abs(field_in_chart(l(0), Chart::HalfPlane, 2.0) - 2.0) < 1e-15);
    }
    SUBCASE("chordal sigma in the disk: -(i/2)(1+z)^2") {
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> u(-0.5, 0.5);
        for (int i = 0; i < 10; ++i) {
            cplx z(u(rng), u(rng));
            cplx got = field_in_chart(-1.0 * l(-1), Chart::Disk, z);
            cplx want = -cplx(0.0, 0.5) * (1.0 + z) * (1.0 + z);
            CHECK(std::abs(got - want) < 1e-13);
        }
    }
    SUBCASE("radial delta in the log chart: 4 ctg(z/2)") {
        cplx z(0.7, 0.9);
        cplx got = field_in_chart(2.0 * (l(-2) + l(0)), Chart::Log, z);
        cplx want = 4.0 * std::cos(z / 2.0) / std::sin(z / 2.0);
        CHECK(std::abs(got - want) < 1e-12);
    }
    SUBCASE("dipolar delta in the strip chart: 4 cth(z/2)") {
        cplx z(0.4, 1.2);
        cplx got = field_in_chart(2.0 * (l(-2) - l(0)), Chart::Strip, z);
        cplx want = 4.0 * std::cosh(z / 2.0) / std::sinh(z / 2.0);
        CHECK(std::abs(got - want) < 1e-12);
    }
}

TEST_CASE("chart covariance of fields") {
    // v^D(z) tau'(z) = v^H(tau(z))
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    WittField v = l(-2, 2.0) + l(-1, -1.0) + l(0, 0.3) + l(1, -0.2);
    for (int i = 0; i < 20; ++i) {
        cplx z(u(rng), u(rng));
        if (std::abs(z - 1.0) < 0.2) continue;  // pole of v sits at z=1 in D
        CJet tau = to_halfplane(Chart::Disk, z);
        cplx lhs = field_in_chart(v, Chart::Disk, z) * tau.d;
        cplx rhs = v.eval_h(tau.f);
        CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(rhs)));
    }
}

TEST_CASE("field chart jet derivatives match finite differences") {
    WittField v = l(-2, 1.5) + l(0, -0.8) + l(1, 0.6);
    for (Chart chart : {Chart::HalfPlane, Chart::Disk, Chart::Strip, Chart::Log}) {
        cplx z = (chart == Chart::Disk) ? cplx(0.2, 0.3) : cplx(0.4, 0.9);
        CJet j = field_chart_jet(v, chart, z);
        double h = 1e-5;
        cplx fd1 = (field_in_chart(v, chart, z + h) - field_in_chart(v, chart, z - h)) /
                   (2.0 * h);
        cplx fd2 = (field_in_chart(v, chart, z + h) - 2.0 * j.f +
                    field_in_chart(v, chart, z - h)) /
                   (h * h);
        CHECK(std::abs(j.d - fd1) < 1e-8 * (1.0 + std::abs(fd1)));
        CHECK(std::abs(j.dd - fd2) < 1e-4 * (1.0 + std::abs(fd2)));
    }
}

TEST_CASE("pps_push special cases") {
    SUBCASE("chi type with positive real derivative is unchanged") {
        CHECK(pps_push(1.25, PpsOrder::chi_type(3.0), 2.0) == doctest::Approx(1.25));
    }
    SUBCASE("Q type adds Q log|d|") {
        CHECK(pps_push(0.5, PpsOrder::q_type(1.0), std::exp(1.0)) ==
              doctest::Approx(1.5));
    }
    SUBCASE("chi type subtracts chi arg d") {
        CHECK(pps_push(0.0, PpsOrder::chi_type(1.0), cplx(0.0, 1.0)) ==
              doctest::Approx(-M_PI / 2.0));
    }
}

TEST_CASE("ito drift") {
    SUBCASE("chordal in H: constant sigma means no correction") {
        WittField delta = 2.0 * l(-2) - 0.7 * l(-1);
        cplx z(0.5, 1.5);
        cplx got = ito_drift(delta, -2.0 * l(-1), Chart::HalfPlane, z);
        CHECK(std::abs(got - (2.0 / z - 0.7)) < 1e-14);
    }
    SUBCASE("sigma = 0 returns delta alone") {
        cplx z(0.3, 1.0);
        CHECK(std::abs(ito_drift(2.0 * l(-2), WittField{}, Chart::HalfPlane, z) -
                       2.0 / z) < 1e-15);
    }
    SUBCASE("dipolar correction against a finite-difference derivative") {
        WittField delta = 2.0 * (l(-2) - l(0));
        double k = 2.0;
        WittField sigma = -std::sqrt(k) * (l(-1) - l(1));
        cplx z(0.0, 1.0);
        double h = 1e-6;
        cplx s = field_in_chart(sigma, Chart::HalfPlane, z);
        cplx sp_fd = (field_in_chart(sigma, Chart::HalfPlane, z + h) -
                      field_in_chart(sigma, Chart::HalfPlane, z - h)) /
                     (2.0 * h);
        cplx want = field_in_chart(delta, Chart::HalfPlane, z) + 0.5 * s * sp_fd;
        cplx got = ito_drift(delta, sigma, Chart::HalfPlane, z);
        CHECK(std::abs(got - want) < 1e-8);
    }
}
