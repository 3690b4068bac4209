#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "lowner/field.hpp"

using namespace lowner;

namespace {
WittField l(int n, double c = 1.0) { return WittField::mode(n, c); }
}

TEST_CASE("bracket law on basis modes") {
    // [l_n, l_m] = (m-n) l_{n+m}
    for (int n = -5; n <= 1; ++n)
        for (int m = -5; m <= 1; ++m) {
            WittField b = bracket(l(n), l(m));
            for (int k = -10; k <= 2; ++k) {
                double expect = (k == n + m) ? double(m - n) : 0.0;
                CHECK(b.coeff(k) == expect);
            }
        }
    CHECK(bracket(l(-2), l(-1)).coeff(-3) == 1.0);
}

TEST_CASE("bracket antisymmetry and bilinearity") {
    WittField v = l(-2, 2.0) + l(0, -1.0) + l(1, 0.5);
    WittField w = l(-1, 3.0) + l(1, -2.0);
    CHECK(bracket(v, v).is_zero());
    WittField anti = bracket(v, w) + bracket(w, v);
    CHECK(anti.is_zero());
    WittField lin = bracket(v + w, w) - bracket(v, w);
    CHECK(lin.is_zero());
}

TEST_CASE("jacobi identity on random mode triples") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> mode(-6, 1);
    for (int trial = 0; trial < 100; ++trial) {
        WittField a = l(mode(rng)), b = l(mode(rng)), c = l(mode(rng));
        WittField s = bracket(a, bracket(b, c));
        s += bracket(b, bracket(c, a));
        s += bracket(c, bracket(a, b));
        CHECK(s.max_abs_coeff() == 0.0);  // integer arithmetic, exact
    }
}

TEST_CASE("bracket agrees with v w' - w v' pointwise") {
    WittField v = l(-2), w = l(1);
    cplx z(1.0, 1.0);
    cplx direct = v.eval_h(z) * w.deriv_h(z) - w.eval_h(z) * v.deriv_h(z);
    WittField b = bracket(v, w);
    CHECK(std::abs(direct - b.eval_h(z)) < 1e-14);
    // [l_-2, l_1] = 3 l_-1, so the value at 1+i is just 3
    CHECK(std::abs(direct - 3.0) < 1e-14);
}

TEST_CASE("delta2 classification of the three complete types") {
    FieldClass p = delta2(l(1));
    CHECK(p.kind == FieldKind::Parabolic);
    CHECK(p.discriminant == 0.0);
    FieldClass hcls = delta2(l(-1) - l(1));
    CHECK(hcls.kind == FieldKind::Hyperbolic);
    CHECK(hcls.discriminant == 1.0);
    FieldClass e = delta2(l(-1) + l(1));
    CHECK(e.kind == FieldKind::Elliptic);
    CHECK(e.discriminant == -1.0);
    CHECK_THROWS_AS(delta2(l(-2)), FieldError);
}

TEST_CASE("delta3 classification of the classical slit fields") {
    FieldClass c = delta3(2.0 * l(-2));
    CHECK(c.kind == FieldKind::Parabolic);
    CHECK(c.discriminant == 0.0);
    FieldClass d = delta3(2.0 * (l(-2) - l(0)));
    CHECK(d.kind == FieldKind::Hyperbolic);
    CHECK(d.discriminant == 32.0);
    FieldClass r = delta3(2.0 * (l(-2) + l(0)));
    CHECK(r.kind == FieldKind::Elliptic);
    CHECK(r.discriminant == -32.0);
    CHECK_THROWS_AS(delta3(l(-1)), FieldError);
}

TEST_CASE("classification invariant under R and S transforms") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        WittField delta = l(-2, u(rng) > 0 ? 1.5 : -1.5) + l(-1, u(rng)) +
                          l(0, u(rng)) + l(1, u(rng));
        WittField sigma = l(-1, 1.0 + std::abs(u(rng))) + l(0, u(rng)) + l(1, u(rng));
        FieldClass d0 = delta3(delta);
        FieldClass s0 = delta2(sigma);
        for (TransformTag tag : {TransformTag::R, TransformTag::S}) {
            auto tr = apply_elementary({tag, u(rng)}, delta, sigma, {});
            FieldClass d1 = delta3(tr.delta);
            FieldClass s1 = delta2(tr.sigma);
            CHECK(d1.kind == d0.kind);
            CHECK(s1.kind == s0.kind);
            CHECK(s1.discriminant == doctest::Approx(s0.discriminant).epsilon(1e-12));
            CHECK(d1.discriminant ==
                  doctest::Approx(d0.discriminant).epsilon(1e-9));
        }
    }
}

TEST_CASE("kappa and nu recover the catalog rows") {
    SUBCASE("driftless kappa=6 chordal") {
        SleParams p = kappa_nu(2.0 * l(-2), l(-1, -std::sqrt(6.0)));
        CHECK(p.kappa == doctest::Approx(6.0).epsilon(1e-14));
        CHECK(p.nu == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(p.direction == FlowDirection::Forward);
    }
    SUBCASE("chordal with drift") {
        double k0 = 3.7, nu0 = -1.25;
        SleParams p = kappa_nu(2.0 * l(-2) - nu0 * l(-1), l(-1, -std::sqrt(k0)));
        CHECK(p.kappa == doctest::Approx(k0).epsilon(1e-14));
        CHECK(p.nu == doctest::Approx(nu0).epsilon(1e-14));
    }
    SUBCASE("dipolar with drift, nu = 0") {
        double k0 = 2.5;
        WittField sig = -std::sqrt(k0) * (l(-1) - l(1));
        SleParams p = kappa_nu(2.0 * (l(-2) - l(0)), sig);
        CHECK(p.kappa == doctest::Approx(k0).epsilon(1e-14));
        CHECK(p.nu == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("reverse direction flag") {
        SleParams p = kappa_nu(-2.0 * l(-2) - 0.5 * l(-1), -l(-1));
        CHECK(p.direction == FlowDirection::Reverse);
        CHECK(p.kappa == doctest::Approx(1.0));
        CHECK(p.nu == doctest::Approx(0.5));
    }
}

TEST_CASE("kappa invariant under P, nu scales as e^c") {
    WittField delta = 2.0 * l(-2) - 0.8 * l(-1) + 0.3 * l(0);
    WittField sigma = -std::sqrt(3.0) * l(-1) + 0.4 * l(0) - 0.2 * l(1);
    SleParams before = kappa_nu(delta, sigma);
    double c = 0.7;
    auto tr = apply_elementary({TransformTag::P, c}, delta, sigma, {});
    SleParams after = kappa_nu(tr.delta, tr.sigma);
    CHECK(after.kappa == doctest::Approx(before.kappa).epsilon(1e-12));
    CHECK(after.nu == doctest::Approx(std::exp(c) * before.nu).epsilon(1e-12));
}

TEST_CASE("elementary transform table rows") {
    WittField delta = 2.0 * l(-2) + 0.5 * l(-1) - l(0) + 0.25 * l(1);
    WittField sigma = -l(-1) + 0.5 * l(0) + 2.0 * l(1);
    SUBCASE("V scales sigma and divides the driver") {
        auto tr = apply_elementary({TransformTag::V, 2.0}, delta, sigma, {});
        CHECK((tr.sigma - 2.0 * sigma).is_zero());
        CHECK((tr.delta - delta).is_zero());
        CHECK(tr.driver.a == doctest::Approx(0.5));
    }
    SUBCASE("S scales mode n by e^{nc}") {
        auto tr = apply_elementary({TransformTag::S, 0.3}, delta, sigma, {});
        for (int n = -2; n <= 1; ++n)
            CHECK(tr.delta.coeff(n) ==
                  doctest::Approx(delta.coeff(n) * std::exp(0.3 * n)));
        for (int n = -1; n <= 1; ++n)
            CHECK(tr.sigma.coeff(n) ==
                  doctest::Approx(sigma.coeff(n) * std::exp(0.3 * n)));
    }
    SUBCASE("R with c=0 is the identity") {
        auto tr = apply_elementary({TransformTag::R, 0.0}, delta, sigma, {});
        CHECK((tr.delta - delta).is_zero());
        CHECK((tr.sigma - sigma).is_zero());
        CHECK(tr.driver.a == 1.0);
        CHECK(tr.driver.b == 1.0);
        CHECK(tr.driver.d == 0.0);
    }
    SUBCASE("R composes as a one-parameter group") {
        auto one = apply_elementary({TransformTag::R, 0.4}, delta, sigma, {});
        auto two = apply_elementary({TransformTag::R, -0.15}, one.delta, one.sigma,
                                    one.driver);
        auto direct = apply_elementary({TransformTag::R, 0.25}, delta, sigma, {});
        for (int n = -2; n <= 1; ++n)
            CHECK(two.delta.coeff(n) == doctest::Approx(direct.delta.coeff(n)));
        for (int n = -1; n <= 1; ++n)
            CHECK(two.sigma.coeff(n) == doctest::Approx(direct.sigma.coeff(n)));
    }
    SUBCASE("T rejects nonpositive dilation") {
        CHECK_THROWS_AS(apply_elementary({TransformTag::T, -1.0}, delta, sigma, {}),
                        FieldError);
    }
    SUBCASE("D moves the drift between delta and the driver") {
        auto tr = apply_elementary({TransformTag::D, 1.5}, delta, sigma, {});
        CHECK((tr.delta - (delta - 1.5 * sigma)).is_zero());
        CHECK(tr.driver.d == doctest::Approx(1.5));
    }
}

TEST_CASE("commutation invariants match the classical values") {
    SUBCASE("chordal has x1 = x2 = x3 = 0") {
        auto inv = commutation_invariants(2.0 * l(-2), -l(-1));
        CHECK(!inv.singular);
        CHECK(inv.x1 == doctest::Approx(0.0));
        CHECK(inv.x2 == doctest::Approx(0.0));
        CHECK(inv.x3 == doctest::Approx(0.0));
        CHECK(inv.x5 == doctest::Approx(1.0 / 3.0));
        CHECK(inv.x4 == doctest::Approx(0.0));
    }
    SUBCASE("forward dipolar x3 = 8/3") {
        auto inv = commutation_invariants(2.0 * (l(-2) - l(0)), -(l(-1) - l(1)));
        CHECK(inv.x3 == doctest::Approx(8.0 / 3.0));
        CHECK(inv.x2 == doctest::Approx(0.0));
        CHECK(inv.x1 == doctest::Approx(0.0));
        CHECK(inv.x5 == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("forward radial x3 = -8/3") {
        auto inv = commutation_invariants(2.0 * (l(-2) + l(0)), -(l(-1) + l(1)));
        CHECK(inv.x3 == doctest::Approx(-8.0 / 3.0));
        CHECK(inv.x2 == doctest::Approx(0.0));
        CHECK(inv.x1 == doctest::Approx(0.0));
    }
    SUBCASE("x5 = 1/(3 kappa), x4 = nu/sqrt(kappa) for normalized inputs") {
        double k = 3.2, nu = 0.8;
        auto inv = commutation_invariants(2.0 * l(-2) - nu * l(-1),
                                          -std::sqrt(k) * l(-1));
        CHECK(inv.x5 == doctest::Approx(1.0 / (3.0 * k)));
        CHECK(inv.x4 == doctest::Approx(nu / std::sqrt(k)));
    }
    SUBCASE("reverse chordal has x5 = -1/(3 kappa)") {
        double k = 2.0;
        auto inv = commutation_invariants(-2.0 * l(-2), -std::sqrt(k) * l(-1));
        CHECK(inv.x5 == doctest::Approx(-1.0 / (3.0 * k)));
    }
}

TEST_CASE("x3,x2,x1 scale as c^2, c^3, c^4 under T_c^2 o V_c") {
    WittField delta = 2.0 * l(-2) + 0.3 * l(-1) - 0.7 * l(0) + 0.2 * l(1);
    WittField sigma = -l(-1) + 0.5 * l(0) - 0.4 * l(1);
    auto base = commutation_invariants(delta, sigma);
    double c = 1.6;
    auto t1 = apply_elementary({TransformTag::T, c}, delta, sigma, {});
    auto t2 = apply_elementary({TransformTag::T, c}, t1.delta, t1.sigma, t1.driver);
    auto tv = apply_elementary({TransformTag::V, c}, t2.delta, t2.sigma, t2.driver);
    auto scaled = commutation_invariants(tv.delta, tv.sigma);
    CHECK(scaled.x3 == doctest::Approx(c * c * base.x3).epsilon(1e-10));
    CHECK(scaled.x2 == doctest::Approx(c * c * c * base.x2).epsilon(1e-10));
    CHECK(scaled.x1 == doctest::Approx(c * c * c * c * base.x1).epsilon(1e-10));
    CHECK(scaled.x5 == doctest::Approx(base.x5).epsilon(1e-10));
}

TEST_CASE("field text form round trip") {
    WittField f = WittField::parse("-2:2,-1:-1");
    CHECK(f.coeff(-2) == 2.0);
    CHECK(f.coeff(-1) == -1.0);
    CHECK(WittField::parse(f.to_string()).coeffs() == f.coeffs());
    CHECK_THROWS_AS(WittField::parse("oops"), FieldError);
}
