#include "koopreach/extrema.hpp"

#include "koopreach/dynamics.hpp"
#include "koopreach/regions.hpp"
#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace koopreach;
using namespace koopreach::extrema;

TEST_CASE("log-magnitude channel") {
    const std::vector<Complex> vals = {Complex(1, 0), Complex(std::exp(1.0), 0), Complex(std::exp(2.0), 0)};
    const ExtremaEstimate est = estimate_extrema(vals);
    CHECK(est.sup_log_mag == Catch::Approx(2.0).margin(1e-12));
    CHECK(est.inf_log_mag == Catch::Approx(0.0).margin(1e-12));
    CHECK(est.n_samples == 3);
    CHECK(est.n_skipped == 0);
}

TEST_CASE("phase channel on a narrow arc") {
    const std::vector<Complex> vals = {std::polar(1.0, 0.1), std::polar(1.0, 0.3)};
    const ExtremaEstimate est = estimate_extrema(vals);
    CHECK(est.sup_phase == Catch::Approx(0.3).margin(1e-12));
    CHECK(est.inf_phase == Catch::Approx(0.1).margin(1e-12));
}

TEST_CASE("circular recentering across the -pi cut") {
    // phases ±3.1 straddle the cut; recentering gives spread 2π − 6.2
    const std::vector<Complex> vals = {std::polar(1.0, 3.1), std::polar(1.0, -3.1)};
    const ExtremaEstimate est = estimate_extrema(vals);
    CHECK(est.sup_phase - est.inf_phase == Catch::Approx(2.0 * kPi - 6.2).margin(1e-12));
    CHECK_FALSE(est.phase_spread_warning);
}

TEST_CASE("magnitude floor skips near-zero values") {
    const std::vector<Complex> vals = {Complex(1, 0), Complex(1e-15, 0)};
    const ExtremaEstimate est = estimate_extrema(vals);
    CHECK(est.n_samples == 1);
    CHECK(est.n_skipped == 1);
    CHECK_THROWS_AS(estimate_extrema({Complex(1e-15, 0)}), DegenerateEigenfunctionError);
}

TEST_CASE("wide phase spread fires the warning") {
    std::vector<Complex> vals;
    for (int k = 0; k < 64; ++k) vals.push_back(std::polar(1.0, -kPi + 2.0 * kPi * k / 64.0));
    CHECK(estimate_extrema(vals).phase_spread_warning);
}

TEST_CASE("L_hat arithmetic") {
    const std::vector<Complex> ones = {Complex(1, 0), Complex(1, 0)};
    const ExtremaEstimate c = estimate_extrema(ones);
    CHECK(L_hat(c, c) == 0.0);

    ExtremaEstimate w = c, v = c;
    w.inf_log_mag = 0.0;
    v.sup_log_mag = 1.0;
    CHECK(L_hat(w, v) == 1.0);
}

TEST_CASE("A_hat requires a shared branch center") {
    const std::vector<Complex> a = {std::polar(1.0, 0.2), std::polar(1.0, 0.4)};
    const ExtremaEstimate ea = estimate_extrema(a, 0.0);
    const ExtremaEstimate eb = estimate_extrema(a, 1.0);
    CHECK_THROWS_AS(A_hat(ea, eb), MisuseError);
    CHECK(A_hat(ea, ea) == Catch::Approx(0.2).margin(1e-12));
}

TEST_CASE("L_hat and A_hat are invariant under complex rescaling") {
    Rng rng(31);
    std::vector<Complex> w, v;
    for (int k = 0; k < 200; ++k) {
        w.push_back(std::polar(rng.uniform(0.5, 2.0), rng.uniform(-0.4, 0.4)));
        v.push_back(std::polar(rng.uniform(0.5, 2.0), rng.uniform(0.3, 1.1)));
    }
    const Complex c = std::polar(3.7, 2.1);
    auto scaled = [&](const std::vector<Complex>& in) {
        std::vector<Complex> out;
        for (const Complex& z : in) out.push_back(c * z);
        return out;
    };
    std::vector<Complex> all = w;
    all.insert(all.end(), v.begin(), v.end());
    std::vector<Complex> all_s = scaled(all);

    const double center = circular_mean_phase(all);
    const double center_s = circular_mean_phase(all_s);
    const ExtremaEstimate ew = estimate_extrema(w, center), ev = estimate_extrema(v, center);
    const ExtremaEstimate ews = estimate_extrema(scaled(w), center_s), evs = estimate_extrema(scaled(v), center_s);
    CHECK(L_hat(ew, ev) == Catch::Approx(L_hat(ews, evs)).margin(1e-12));
    CHECK(A_hat(ew, ev) == Catch::Approx(A_hat(ews, evs)).margin(1e-12));
}

TEST_CASE("L_hat on a dense grid agrees with the brute-force oracle") {
    const auto pairs = dynamics::analytic_eigenpairs_example1();
    const auto& psi2 = pairs[1].psi;
    const regions::Region x0 = regions::make_bump_sublevel(regions::BumpField{0.05, 1.15, 1, 2, 0.05}, -0.1);
    const regions::Region xf = regions::make_bump_sublevel(regions::BumpField{1.85, -0.75, 5, 8, 0.1}, -0.7);
    auto member0 = [&](const Vector& p) { return regions::contains(x0, p); };
    auto memberf = [&](const Vector& p) { return regions::contains(xf, p); };
    const auto grid0 = oracles::dense_grid(x0.bounding(), 1000, member0);
    const auto gridf = oracles::dense_grid(xf.bounding(), 1000, memberf);
    REQUIRE(grid0.size() > 10000);
    REQUIRE(gridf.size() > 10000);

    std::vector<Complex> v0, vf;
    for (const auto& p : grid0) v0.push_back(psi2(p));
    for (const auto& p : gridf) vf.push_back(psi2(p));
    std::vector<Complex> all = v0;
    all.insert(all.end(), vf.begin(), vf.end());
    const double center = circular_mean_phase(all);

    const ExtremaEstimate e0 = estimate_extrema(v0, center);
    const ExtremaEstimate ef = estimate_extrema(vf, center);
    const auto g0 = oracles::grid_extrema(grid0, psi2, center);
    const auto gf = oracles::grid_extrema(gridf, psi2, center);
    CHECK(L_hat(e0, ef) == Catch::Approx(oracles::grid_L(g0, gf)).margin(1e-3));
    CHECK(A_hat(e0, ef) == Catch::Approx(oracles::grid_A(g0, gf)).margin(1e-3));
}

TEST_CASE("one-sidedness under nested sampling") {
    // L_hat from a subset ≤ L_hat from the full sample ≤ dense-grid value
    const auto pairs = dynamics::analytic_eigenpairs_example1();
    const auto& psi1 = pairs[0].psi;
    const regions::Region x0 = regions::make_bump_sublevel(regions::BumpField{0.05, 1.15, 1, 2, 0.05}, -0.1);
    const regions::Region xf = regions::make_bump_sublevel(regions::BumpField{1.85, -0.75, 5, 8, 0.1}, -0.7);

    const auto pts0 = regions::sample_iid(x0, 4000, 77);
    const auto ptsf = regions::sample_iid(xf, 4000, 78);
    auto values = [&](const std::vector<Vector>& pts, std::size_t n) {
        std::vector<Complex> out;
        for (std::size_t k = 0; k < n; ++k) out.push_back(psi1(pts[k]));
        return out;
    };
    for (std::size_t subset : {200, 1000, 4000}) {
        const ExtremaEstimate sub0 = estimate_extrema(values(pts0, subset), 0.0);
        const ExtremaEstimate subf = estimate_extrema(values(ptsf, subset), 0.0);
        const ExtremaEstimate full0 = estimate_extrema(values(pts0, 4000), 0.0);
        const ExtremaEstimate fullf = estimate_extrema(values(ptsf, 4000), 0.0);
        CHECK(L_hat(sub0, subf) <= L_hat(full0, fullf) + 1e-12);

        const auto grid0 = oracles::dense_grid(x0.bounding(), 600, [&](const Vector& p) { return regions::contains(x0, p); });
        const auto gridf = oracles::dense_grid(xf.bounding(), 600, [&](const Vector& p) { return regions::contains(xf, p); });
        const auto g0 = oracles::grid_extrema(grid0, psi1, 0.0);
        const auto gf = oracles::grid_extrema(gridf, psi1, 0.0);
        CHECK(L_hat(full0, fullf) <= oracles::grid_L(g0, gf) + 1e-9);
    }
}

TEST_CASE("required_samples formula") {
    CHECK(required_samples(0.5, 0.5) == 1);
    CHECK(required_samples(0.05, 0.01) == 299);
    CHECK(required_samples(0.01, 0.1) == 44);
    CHECK(required_samples(0.05, 0.05) == 59);
    CHECK(required_samples(0.3, 1.0) == 1);
    CHECK_THROWS_AS(required_samples(0.05, 0.0), InputError);
    CHECK_THROWS_AS(required_samples(0.05, -0.1), InputError);
    CHECK_THROWS_AS(required_samples(1.5, 0.5), InputError);
}

TEST_CASE("plan_sampling splits the budget over extrema") {
    const SamplingPlan plan = plan_sampling(0.2, 1, 0.05);
    CHECK(plan.per_extremum_sigma == Catch::Approx(0.025));
    CHECK(plan.n_required == 72);

    const SamplingPlan plan2 = plan_sampling(0.2, 2, 0.05);
    CHECK(plan2.n_required > plan.n_required);

    const SamplingPlan degenerate = plan_sampling(0.999, 1, 1.0);
    CHECK(degenerate.n_required == 1);
}

TEST_CASE("empirical coverage of the extremum-sampling lemma") {
    // f = x on [0,1]: exact P_ε = ε. With N = required_samples(σ, P_ε), the
    // sup-estimate may miss by more than ε in at most σ (+ slack) of repeats.
    const double sigma = 0.1, eps = 0.1;
    const std::size_t n = required_samples(sigma, eps);  // 22
    const int repeats = 2000;
    int misses = 0;
    for (int r = 0; r < repeats; ++r) {
        Rng rng = Rng::substream(555, static_cast<std::uint64_t>(r));
        double best = 0;
        for (std::size_t k = 0; k < n; ++k) best = std::max(best, rng.uniform());
        if (1.0 - best > eps) ++misses;
    }
    CHECK(static_cast<double>(misses) / repeats <= sigma + 0.02);
}
