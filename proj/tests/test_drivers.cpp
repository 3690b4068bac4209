#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "lowner/drivers.hpp"

using namespace lowner;

TEST_CASE("repeated queries are memoized") {
    DriverPath p = DriverPath::brownian(4.0, 0.5, 42);
    double a = p.value_at(0.37);
    double b = p.value_at(0.37);
    CHECK(a == b);
    // a refinement in between does not disturb the recorded knot
    p.value_at(0.1);
    p.value_at(0.2);
    CHECK(p.value_at(0.37) == a);
}

TEST_CASE("seed determinism") {
    auto sample = [](std::uint64_t seed) {
        DriverPath p = DriverPath::brownian(2.0, 0.0, seed);
        std::vector<double> out;
        for (double t : {1.0, 0.5, 0.25, 0.75, 2.0}) out.push_back(p.value_at(t));
        return out;
    };
    CHECK(sample(7) == sample(7));
    CHECK(sample(7) != sample(8));
}

TEST_CASE("brownian bridge conditional mean") {
    // with knots (0,0) and (1,X): E[u_t] = t X over re-seeded paths
    const int n = 10000;
    const double t = 0.3;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        DriverPath p = DriverPath::brownian(1.0, 0.0, 1000 + i);
        double x = p.value_at(1.0);
        double v = p.value_at(t) - t * x;
        sum += v;
        sumsq += v * v;
    }
    double mean = sum / n;
    double se = std::sqrt((sumsq / n - mean * mean) / n);
    CHECK(std::abs(mean) <= 3.0 * se + 1e-12);
}

TEST_CASE("brownian bridge conditional variance") {
    const int n = 20000;
    const double t0 = 0.2, t1 = 1.0, t = 0.5;
    double kappa = 3.0;
    double sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        DriverPath p = DriverPath::brownian(kappa, 0.0, 555 + i);
        double v0 = p.value_at(t0), v1 = p.value_at(t1);
        double mean = v0 + (v1 - v0) * (t - t0) / (t1 - t0);
        double d = p.value_at(t) - mean;
        sumsq += d * d;
    }
    double want = kappa * (t - t0) * (t1 - t) / (t1 - t0);
    CHECK(sumsq / n == doctest::Approx(want).epsilon(0.05));
}

TEST_CASE("subordinator positivity and alpha=2 degeneration") {
    RngStream rng(99);
    for (int i = 0; i < 1000; ++i) {
        CHECK(levy_subordinator(1.3, 0.7, rng) > 0.0);
    }
    CHECK(levy_subordinator(2.0, 0.7, rng) == doctest::Approx(1.4));
    CHECK_THROWS_AS(levy_subordinator(2.5, 1.0, rng), FieldError);
    CHECK_THROWS_AS(levy_subordinator(1.0, 0.0, rng), FieldError);
}

TEST_CASE("alpha=2 increments carry variance 2t") {
    const int n = 40000;
    double sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        DriverPath p = DriverPath::levy(2.0, 10000 + i);
        double v = p.value_at(1.0);
        sumsq += v * v;
    }
    CHECK(sumsq / n == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("levy characteristic function") {
    const int n = 100000;
    for (double alpha : {1.0, 1.5}) {
        std::vector<double> samples;
        samples.reserve(n);
        RngStream rng(mix_seed(31337, int(alpha * 10)));
        for (int i = 0; i < n; ++i) {
            double y = levy_subordinator(alpha, 1.0, rng);
            samples.push_back(std::sqrt(y) * rng.normal());
        }
        for (double theta : {0.5, 1.0}) {
            double re = 0.0;
            for (double s : samples) re += std::cos(theta * s);
            re /= n;
            double want = std::exp(-std::pow(std::abs(theta), alpha));
            CHECK(std::abs(re - want) <= 0.02);
        }
    }
}

TEST_CASE("subordinator scaling: Y_{4t} vs 4^{2/alpha} Y_t by quantiles") {
    const int n = 100000;
    const double alpha = 1.0, t = 0.5, c = 4.0;
    std::vector<double> a(n), b(n);
    RngStream r1(777), r2(778);
    for (int i = 0; i < n; ++i) {
        a[i] = levy_subordinator(alpha, c * t, r1);
        b[i] = std::pow(c, 2.0 / alpha) * levy_subordinator(alpha, t, r2);
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (double q : {0.25, 0.5, 0.75}) {
        double qa = a[size_t(q * n)], qb = b[size_t(q * n)];
        CHECK(std::abs(qa / qb - 1.0) < 0.05);
    }
}

TEST_CASE("levy bridge endpoints and symmetry") {
    SUBCASE("value approaches the endpoint in probability") {
        const int n = 4000;
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            RngStream rng(mix_seed(4242, i));
            double v = levy_bridge(0.0, 1.0, 1.0, 3.0, 1e-7, 1.5, rng);
            worst = std::max(worst, std::abs(v - 1.0));
        }
        CHECK(worst < 0.5);
    }
    SUBCASE("alpha=2 bridge variance is 2 (t-t0)(t1-t)/(t1-t0)") {
        const int n = 30000;
        double sumsq = 0.0;
        for (int i = 0; i < n; ++i) {
            RngStream rng(mix_seed(515, i));
            double v = levy_bridge(0.0, 0.0, 1.0, 0.0, 0.25, 2.0, rng);
            sumsq += v * v;
        }
        CHECK(sumsq / n == doctest::Approx(2.0 * 0.25 * 0.75).epsilon(0.05));
    }
    SUBCASE("symmetric pinning has median zero") {
        const int n = 100000;
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i) {
            RngStream rng(mix_seed(616, i));
            v[i] = levy_bridge(0.0, 0.0, 1.0, 0.0, 0.5, 1.2, rng);
        }
        std::nth_element(v.begin(), v.begin() + n / 2, v.end());
        CHECK(std::abs(v[n / 2]) < 0.02);
    }
}

TEST_CASE("refinement only inserts knots; recorded values are stable") {
    DriverPath p = DriverPath::levy(1.5, 2024);
    double end = p.value_at(1.0);
    auto knots_before = p.knots();
    for (double t : {0.5, 0.25, 0.75, 0.125}) p.value_at(t);
    for (auto& [t, v] : knots_before) {
        auto it = p.knots().find(t);
        REQUIRE(it != p.knots().end());
        CHECK(it->second == v);
    }
    CHECK(p.value_at(1.0) == end);
    CHECK(p.knots().size() == knots_before.size() + 4);
}

TEST_CASE("named deterministic closures") {
    auto f = DriverPath::named_closure("poly4");
    CHECK(f(0.0) == 0.0);
    CHECK(f(1.0) == 0.0);
    CHECK(DriverPath::named_closure("zero")(3.0) == 0.0);
    CHECK_THROWS_AS(DriverPath::named_closure("nope"), FieldError);
}
