#include <cmath>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "needlebench/ensemble.hpp"
#include "test_helpers.hpp"

using namespace needlebench;
using needlebench::testing::matern_spec;
using needlebench::testing::se_spec;
using needlebench::testing::shared_profile;

namespace {

constexpr double kPi = 3.14159265358979323846;

NeedleEnsemble build_relaxed(const KernelSpec& spec, double eps, double B) {
    BuildOptions opts;
    opts.strict = false;
    return build_ensemble(spec, eps, B, shared_profile(spec.d), opts);
}

} // namespace

TEST_CASE("member count from the grid step") {
    CHECK(member_count_for_step(0.25, 2) == 16);
    CHECK(member_count_for_step(0.25, 1) == 4);
    CHECK(member_count_for_step(0.3, 1) == 3);
    CHECK(member_count_for_step(1.5, 1) == 0);
}

TEST_CASE("SE width matches an independent evaluation of the closed form") {
    const auto p = shared_profile(1);
    const KernelSpec spec = se_spec(1.0);
    const double eps = 0.01, B = 1.0;
    const NeedleEnsemble ens = build_relaxed(spec, eps, B);
    // oracle: direct arithmetic on the closed form with the quadrature h(0)
    const double arg = B * std::pow(2.0 * kPi * spec.l * spec.l, 0.25) * p->h0 / (2.0 * eps);
    const double w0_oracle = kPi * spec.l / std::sqrt(std::log(arg));
    CHECK(ens.w0 == doctest::Approx(w0_oracle).epsilon(1e-12));
    CHECK(ens.w == doctest::Approx(2.0 * p->zeta_outer * w0_oracle).epsilon(1e-12));
}

TEST_CASE("Matern width: halving epsilon multiplies w0 by 2^{-1/nu} exactly") {
    const KernelSpec spec = matern_spec(0.1, 1.5);
    const NeedleEnsemble a = build_relaxed(spec, 0.04, 1.0);
    const NeedleEnsemble b = build_relaxed(spec, 0.02, 1.0);
    CHECK(b.w0 / a.w0 == doctest::Approx(std::pow(2.0, -1.0 / 1.5)).epsilon(1e-12));
}

TEST_CASE("strict construction rejects M < 2 and names the condition") {
    const KernelSpec spec = se_spec(1.0);
    CHECK_THROWS_WITH_AS(build_ensemble(spec, 0.01, 1.0, shared_profile(1), BuildOptions{}),
                         doctest::Contains("epsilon/B too large"), ConstructionError);
    // amplitude too large for the width formula is always an error
    BuildOptions relaxed;
    relaxed.strict = false;
    CHECK_THROWS_AS(build_ensemble(spec, 0.5, 1.0, shared_profile(1), relaxed),
                    ConstructionError);
}

TEST_CASE("needle peaks at 2 epsilon at its own center") {
    const NeedleEnsemble ens = build_relaxed(matern_spec(0.1, 1.5), 0.02, 1.0);
    REQUIRE(ens.M >= 2);
    for (long long m = 1; m <= ens.M; ++m) {
        CHECK(eval_needle(ens, m, ens.center(m)) ==
              doctest::Approx(2.0 * ens.epsilon).epsilon(1e-9));
    }
    // zero member
    CHECK(eval_needle(ens, 0, {0.3}) == 0.0);
    // domain check
    CHECK_THROWS_AS(eval_needle(ens, 1, {1.5}), std::domain_error);
}

TEST_CASE("needle value drops below epsilon at 1.5 w from the center") {
    const NeedleEnsemble ens = build_relaxed(matern_spec(0.1, 1.5), 0.02, 1.0);
    const auto c = ens.center(1);
    const double x = c[0] + 1.5 * ens.w;
    if (x <= 1.0) {
        CHECK(eval_needle(ens, 1, {x}) < ens.epsilon);
    }
    // and already below epsilon at w (the half-radius is w/2)
    CHECK(eval_needle(ens, 1, {c[0] + ens.w}) < ens.epsilon);
}

TEST_CASE("separation: epsilon-optimal points are exclusive to one member") {
    for (const KernelSpec spec : {matern_spec(0.1, 1.5), se_spec(0.1)}) {
        const double eps = spec.family == KernelFamily::Matern ? 0.05 : 0.02;
        const NeedleEnsemble ens = build_relaxed(spec, eps, 1.0);
        REQUIRE(ens.M >= 2);
        const int n_scan = 10000;
        for (int i = 0; i < n_scan; ++i) {
            const double x = static_cast<double>(i) / (n_scan - 1);
            int optimal_for = 0;
            for (long long m = 1; m <= ens.M; ++m)
                if (eval_needle(ens, m, {x}) >= ens.epsilon) ++optimal_for;
            CHECK(optimal_for <= 1);
        }
    }
}

TEST_CASE("separation in d=2 on a 100x100 scan") {
    const NeedleEnsemble ens = build_relaxed(matern_spec(0.1, 1.5, 2), 0.05, 1.0);
    REQUIRE(ens.M >= 4);
    for (int i = 0; i < 100; ++i) {
        for (int j = 0; j < 100; ++j) {
            const std::vector<double> x{i / 99.0, j / 99.0};
            int optimal_for = 0;
            for (long long m = 1; m <= ens.M; ++m)
                if (eval_needle(ens, m, x) >= ens.epsilon) ++optimal_for;
            CHECK(optimal_for <= 1);
        }
    }
}

TEST_CASE("needle congruence: members are shifts of one template") {
    const NeedleEnsemble ens = build_relaxed(matern_spec(0.1, 1.5), 0.02, 1.0);
    REQUIRE(ens.M >= 2);
    const auto c1 = ens.center(1), c2 = ens.center(2);
    for (double delta : {-0.02, 0.0, 0.013, 0.05}) {
        const double x1 = c1[0] + delta, x2 = c2[0] + delta;
        if (x1 < 0.0 || x1 > 1.0 || x2 < 0.0 || x2 > 1.0) continue;
        CHECK(eval_needle(ens, 1, {x1}) ==
              doctest::Approx(eval_needle(ens, 2, {x2})).epsilon(1e-10));
    }
}

TEST_CASE("M is monotone nonincreasing in epsilon") {
    for (const KernelSpec spec : {matern_spec(0.1, 1.5), se_spec(0.05)}) {
        long long prev = -1;
        for (double eps : {0.005, 0.01, 0.02, 0.05, 0.1}) {
            // B = 10 keeps the SE width formula inside its domain at eps = 0.1
            const long long M = ensemble_geometry(spec, eps, 10.0, *shared_profile(1)).M;
            if (prev >= 0) CHECK(M <= prev);
            prev = M;
        }
    }
}

TEST_CASE("amplitude linearity: doubled epsilon doubles values at fixed w0") {
    BuildOptions opts;
    opts.strict = false;
    opts.w0_override = 0.1;
    const auto p = shared_profile(1);
    const KernelSpec spec = matern_spec(0.1, 1.5);
    const NeedleEnsemble a = build_ensemble(spec, 0.01, 1.0, p, opts);
    const NeedleEnsemble b = build_ensemble(spec, 0.02, 1.0, p, opts);
    REQUIRE(a.M == b.M);
    for (double x : {0.07, 0.21, 0.5, 0.93}) {
        CHECK(2.0 * eval_needle(a, 1, {x}) == doctest::Approx(eval_needle(b, 1, {x})).epsilon(1e-14));
    }
}

TEST_CASE("region index quantization and tie-breaking") {
    BuildOptions opts;
    opts.strict = false;
    opts.w0_override = 0.25 / (2.0 * shared_profile(1)->zeta_outer); // forces w = 0.25
    const NeedleEnsemble ens =
        build_ensemble(se_spec(0.3), 0.01, 1.0, shared_profile(1), opts);
    REQUIRE(ens.per_dim == 4);
    CHECK(ens.w == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(region_index(ens, {0.30}) == 2);        // cells [0,.25), [.25,.5), ...
    CHECK(region_index(ens, {0.25}) == 1);        // boundary goes to the lower cell
    CHECK(region_index(ens, {0.9999}) == 4);
    for (long long m = 1; m <= ens.M; ++m) {
        CHECK(region_index(ens, ens.center(m)) == m); // centers lie strictly inside
    }
}

TEST_CASE("vbar: peak cell, zero member, and the subgrid oracle never exceeds it") {
    const NeedleEnsemble ens = build_relaxed(matern_spec(0.1, 1.5), 0.02, 1.0);
    REQUIRE(ens.M >= 3);
    for (long long m = 1; m <= ens.M; ++m) {
        CHECK(vbar(ens, m, m) == doctest::Approx(2.0 * ens.epsilon).epsilon(1e-9));
        CHECK(vbar(ens, 0, m) == 0.0);
        for (long long j = 1; j <= ens.M; ++j) {
            const double v = vbar(ens, m, j);
            CHECK(v <= 2.0 * ens.epsilon);
            CHECK(v >= vbar_subgrid_scan(ens, m, j)); // certified upper envelope
        }
    }
}

TEST_CASE("vbar sums: degenerate single-member ensemble") {
    // large epsilon -> single centered needle
    const NeedleEnsemble ens = build_relaxed(matern_spec(0.5, 1.5), 0.05, 1.0);
    REQUIRE(ens.M == 1);
    const VbarSums sums = vbar_sums_report(ens);
    CHECK(sums.max_over_m_sum_j == doctest::Approx(2.0));
    CHECK(sums.max_over_j_sum_m == doctest::Approx(2.0));
    CHECK(sums.max_over_j_sum_m_sq == doctest::Approx(4.0));
}

TEST_CASE("vbar sums stay order epsilon across the epsilon sweep") {
    const KernelSpec spec = matern_spec(0.1, 1.5);
    double lo1 = 1e300, hi1 = 0.0;
    for (double eps : {0.1, 0.05, 0.02, 0.01}) {
        const NeedleEnsemble ens = build_relaxed(spec, eps, 1.0);
        const VbarSums sums = vbar_sums_report(ens);
        lo1 = std::min(lo1, sums.max_over_m_sum_j);
        hi1 = std::max(hi1, sums.max_over_m_sum_j);
        // third quantity <= 2 x second, since vbar <= 2 eps pointwise
        CHECK(sums.max_over_j_sum_m_sq <= 2.0 * sums.max_over_j_sum_m + 1e-12);
    }
    CHECK(hi1 / lo1 < 2.0);
}

TEST_CASE("ensemble JSON schema") {
    const NeedleEnsemble ens = build_relaxed(matern_spec(0.1, 1.5), 0.05, 1.0);
    const nlohmann::json j = nlohmann::json::parse(ensemble_to_json(ens));
    for (const char* key :
         {"family", "d", "l", "nu", "epsilon", "B", "w0", "w", "M", "zeta", "h0", "centers"}) {
        CHECK(j.contains(key));
    }
    CHECK(j["M"].get<long long>() == ens.M);
    CHECK(j["centers"].size() == static_cast<std::size_t>(ens.M));
}
