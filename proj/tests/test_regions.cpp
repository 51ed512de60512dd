#include "koopreach/regions.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace koopreach;
using namespace koopreach::regions;

namespace {
Region example1_x0() { return make_bump_sublevel(BumpField{0.05, 1.15, 1.0, 2.0, 0.05}, -0.1); }
Region example1_xf() { return make_bump_sublevel(BumpField{1.85, -0.75, 5.0, 8.0, 0.1}, -0.7); }
}  // namespace

TEST_CASE("box membership is closed and componentwise") {
    const Box b = make_box({1.0, 1.0}, {1.1, 1.1});
    Vector p(2);
    p << 1.05, 1.05;
    CHECK(b.contains(p));
    p << 1.0, 1.1;  // corner
    CHECK(b.contains(p));
    p << 0.999, 1.05;
    CHECK_FALSE(b.contains(p));
}

TEST_CASE("bump field value at its center") {
    const BumpField h{1.85, -0.75, 5.0, 8.0, 0.1};
    Vector c(2);
    c << 1.85, -0.75;
    CHECK(h(c) == Catch::Approx(-1.0).margin(1e-15));
    CHECK(contains(example1_xf(), c));
}

TEST_CASE("sublevel bounding box validation rejects a box cutting the set") {
    const BumpField h{0.0, 0.0, 1.0, 2.0, 0.5};
    Box tight = make_box({-0.25, -0.25}, {0.25, 0.25});  // set extends well past ±0.5·s
    CHECK_THROWS_AS(make_sublevel(ScalarFieldSpec{"bump", {0, 0, 1, 2, 0.5}}, -0.1, tight), InputError);
}

TEST_CASE("uniform box sampling has the right mean") {
    const Region unit(make_box({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}));
    const auto pts = sample_iid(unit, 10000, 123);
    Vector mean = Vector::Zero(3);
    for (const auto& p : pts) mean += p;
    mean /= 10000.0;
    for (int i = 0; i < 3; ++i) CHECK(std::abs(mean[i] - 0.5) < 0.02);  // 3σ ≈ 0.0087
}

TEST_CASE("sub-box frequencies match volume ratios within 4 sigma") {
    const Region unit(make_box({0.0, 0.0}, {1.0, 1.0}));
    const std::size_t n = 100000;
    const auto pts = sample_iid(unit, n, 99);
    const Box sub = make_box({0.2, 0.3}, {0.5, 0.8});
    std::size_t hits = 0;
    for (const auto& p : pts)
        if (sub.contains(p)) ++hits;
    const double vol = sub.volume();
    const double sigma = std::sqrt(vol * (1 - vol) / static_cast<double>(n));
    CHECK(std::abs(static_cast<double>(hits) / n - vol) < 4.0 * sigma);
}

TEST_CASE("sublevel rejection sampling returns only members") {
    const Region x0 = example1_x0();
    const auto pts = sample_iid(x0, 2000, 7);
    for (const auto& p : pts) REQUIRE(contains(x0, p));
}

TEST_CASE("sampling is deterministic given the seed") {
    const Region xf = example1_xf();
    const auto a = sample_iid(xf, 512, 2024);
    const auto b = sample_iid(xf, 512, 2024);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == b[k]);
    const auto c = sample_iid(xf, 512, 2025);
    bool any_diff = false;
    for (std::size_t k = 0; k < a.size(); ++k)
        if (a[k] != c[k]) any_diff = true;
    CHECK(any_diff);
}

TEST_CASE("union sampling covers members and stays inside") {
    const Region u = make_union({Region(make_box({0.0, 0.0}, {1.0, 1.0})), Region(make_box({2.0, 0.0}, {4.0, 1.0}))});
    const auto pts = sample_iid(u, 6000, 5);
    std::size_t left = 0;
    for (const auto& p : pts) {
        REQUIRE(contains(u, p));
        if (p[0] <= 1.0) ++left;
    }
    // member volumes 1 and 2 → expect about one third on the left
    const double frac = static_cast<double>(left) / 6000.0;
    CHECK(frac == Catch::Approx(1.0 / 3.0).margin(0.03));
}

TEST_CASE("infeasible sublevel region raises") {
    // empty set: bump field is always > threshold -10... use threshold below min(-1)
    const BumpField h{0.0, 0.0, 0.0, 0.0, 0.1};
    Box bb = make_box({-0.45, -0.45}, {0.45, 0.45});
    const Region r = make_sublevel(ScalarFieldSpec{"bump", {0, 0, 0, 0, 0.1}}, -5.0, bb);
    CHECK_THROWS_AS(sample_iid(r, 10, 1), InfeasibleRegionError);
}

TEST_CASE("eps-measure: constant function gives 1") {
    const Region unit(make_box({0.0}, {1.0}));
    const double m = estimate_eps_measure(
        unit, [](const Vector&) { return 3.0; }, 0.01, Extremum::Sup, 2000, 3);
    CHECK(m == 1.0);
}

TEST_CASE("eps-measure: linear function on [0,1]") {
    const Region unit(make_box({0.0}, {1.0}));
    const double m = estimate_eps_measure(
        unit, [](const Vector& x) { return x[0]; }, 0.1, Extremum::Sup, 10000, 11);
    CHECK(m == Catch::Approx(0.1).margin(0.02));
    const double mi = estimate_eps_measure(
        unit, [](const Vector& x) { return x[0]; }, 0.1, Extremum::Inf, 10000, 11);
    CHECK(mi == Catch::Approx(0.1).margin(0.02));
}

TEST_CASE("eps-measure: quadratic slivers near both ends") {
    // f = x² on [−1,1], sup-version: measure = 1 − sqrt(1−eps)
    const Region seg(make_box({-1.0}, {1.0}));
    const double m = estimate_eps_measure(
        seg, [](const Vector& x) { return x[0] * x[0]; }, 0.19, Extremum::Sup, 10000, 17);
    CHECK(m == Catch::Approx(0.1).margin(0.02));
}

TEST_CASE("eps-measure is monotone in eps with shared samples") {
    const Region seg(make_box({0.0}, {1.0}));
    double prev = 0;
    for (double eps : {0.02, 0.05, 0.1, 0.2, 0.4}) {
        const double m = estimate_eps_measure(
            seg, [](const Vector& x) { return std::sin(3.0 * x[0]); }, eps, Extremum::Sup, 5000, 21);
        CHECK(m >= prev);
        prev = m;
    }
}
