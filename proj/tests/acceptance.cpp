// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails.  Every tolerance is pinned here, in code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "needlebench/bounds.hpp"
#include "needlebench/quadrature.hpp"
#include "needlebench/rkhs.hpp"
#include "needlebench/rng.hpp"
#include "needlebench/simulator.hpp"

using namespace needlebench;

namespace {

int failures = 0;

void report(int idx, const std::string& name, bool pass, const std::string& detail) {
    std::printf("criterion %02d [%s] %s%s%s\n", idx, name.c_str(), pass ? "PASS" : "FAIL",
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::shared_ptr<const BumpProfile> profile_for(int d) {
    static std::shared_ptr<const BumpProfile> cache[3];
    if (d < 1 || d > 2) return std::make_shared<const BumpProfile>(inverse_transform_profile(d));
    if (!cache[d]) cache[d] = std::make_shared<const BumpProfile>(inverse_transform_profile(d));
    return cache[d];
}

NeedleEnsemble build_relaxed(const KernelSpec& spec, double eps, double B) {
    BuildOptions opts;
    opts.strict = false;
    return build_ensemble(spec, eps, B, profile_for(spec.d), opts);
}

struct ConstructionOutcome {
    bool pass = true;
    std::string detail;
};

// Shared body of criteria 1-2: margin, peak values, separation scan.
ConstructionOutcome construction_validity(const KernelSpec& spec, double eps, double B) {
    ConstructionOutcome out;
    const NeedleEnsemble ens = build_relaxed(spec, eps, B);
    const NormCertificate cert = compute_certificate(ens);
    if (!(cert.margin >= -1e-6 * B)) {
        out.pass = false;
        out.detail += "margin " + std::to_string(cert.margin) + "; ";
    }
    for (long long m = 1; m <= ens.M; ++m) {
        const double peak = eval_needle(ens, m, ens.center(m));
        if (std::abs(peak - 2.0 * eps) > 1e-6 * eps) {
            out.pass = false;
            out.detail += "peak defect at m=" + std::to_string(m) + "; ";
            break;
        }
    }
    const int n_scan = 10000;
    for (int i = 0; i < n_scan; ++i) {
        const double x = static_cast<double>(i) / (n_scan - 1);
        int optimal_for = 0;
        for (long long m = 1; m <= ens.M; ++m)
            if (eval_needle(ens, m, {x}) >= eps) ++optimal_for;
        if (optimal_for > 1) {
            out.pass = false;
            out.detail += "separation violated at x=" + std::to_string(x) + "; ";
            break;
        }
    }
    out.detail += "M=" + std::to_string(ens.M);
    return out;
}

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

} // namespace

int main() {
    const auto t_start = std::chrono::steady_clock::now();

    // 1. Construction validity, SE: d=1, l=1, B=1, eps in {0.05, 0.02, 0.01}
    {
        bool pass = true;
        std::string detail;
        for (double eps : {0.05, 0.02, 0.01}) {
            const auto out = construction_validity(
                KernelSpec{KernelFamily::SquaredExponential, 1.0, 1.5, 1}, eps, 1.0);
            pass = pass && out.pass;
            detail += "eps=" + std::to_string(eps) + " " + out.detail + "  ";
        }
        report(1, "construction-validity-se", pass, detail);
    }

    // 2. Construction validity, Matern: nu in {1.5, 2.5}, d=1, same epsilon suite
    {
        bool pass = true;
        std::string detail;
        for (double nu : {1.5, 2.5}) {
            for (double eps : {0.05, 0.02, 0.01}) {
                const auto out = construction_validity(
                    KernelSpec{KernelFamily::Matern, 1.0, nu, 1}, eps, 1.0);
                pass = pass && out.pass;
            }
            detail += "nu=" + std::to_string(nu) + " done  ";
        }
        report(2, "construction-validity-matern", pass, detail);
    }

    // 3. M-scaling shapes: SE slope d/2 within 20%, Matern slope d/nu within 10%
    {
        bool pass = true;
        std::string detail;
        const std::vector<double> eps_sweep = {0.1, 0.05, 0.02, 0.01, 0.005};
        for (int d : {1, 2}) {
            // SE at l=0.05, B=10: regress log M on log of the closed-form log-term
            const KernelSpec se{KernelFamily::SquaredExponential, 0.05, 1.5, d};
            const auto prof = profile_for(d);
            std::vector<double> xs, ys;
            for (double eps : eps_sweep) {
                const EnsembleGeometry g = ensemble_geometry(se, eps, 10.0, *prof);
                const double L = std::log(10.0 *
                                          std::pow(2.0 * 3.14159265358979323846 * se.l * se.l,
                                                   0.25 * d) *
                                          prof->h0 / (2.0 * eps));
                xs.push_back(std::log(L));
                ys.push_back(std::log(static_cast<double>(g.M)));
            }
            const double se_slope = fit_slope(xs, ys);
            const bool se_ok = std::abs(se_slope - 0.5 * d) <= 0.2 * (0.5 * d);
            pass = pass && se_ok;
            detail += "SE d=" + std::to_string(d) + " slope=" + std::to_string(se_slope) + "  ";

            // Matern nu=1.5 at l=0.1, B=10: regress log M on log(B/eps)
            const KernelSpec ma{KernelFamily::Matern, 0.1, 1.5, d};
            xs.clear();
            ys.clear();
            for (double eps : eps_sweep) {
                const EnsembleGeometry g = ensemble_geometry(ma, eps, 10.0, *prof);
                xs.push_back(std::log(10.0 / eps));
                ys.push_back(std::log(static_cast<double>(g.M)));
            }
            const double ma_slope = fit_slope(xs, ys);
            const double target = d / 1.5;
            const bool ma_ok = std::abs(ma_slope - target) <= 0.1 * target;
            pass = pass && ma_ok;
            detail += "Matern d=" + std::to_string(d) + " slope=" + std::to_string(ma_slope) + "  ";
        }
        report(3, "m-scaling-shapes", pass, detail);
    }

    // 4. KL and expectation-transfer suite
    {
        bool pass = true;
        std::string detail;
        // gaussian_kl vs quadrature on 20 random triples, 1e-8
        SequentialRng rng(1001, 0);
        for (int i = 0; i < 20; ++i) {
            const double mu1 = 2.0 * rng.uniform() - 1.0;
            const double mu2 = 2.0 * rng.uniform() - 1.0;
            const double sigma = 0.3 + rng.uniform();
            const double lo = mu1 - 12.0 * sigma, hi = mu1 + 12.0 * sigma;
            const double quad = integrate_simpson(
                [&](double z) {
                    const double p1 = std::exp(-(z - mu1) * (z - mu1) / (2 * sigma * sigma)) /
                                      (sigma * std::sqrt(2 * 3.14159265358979323846));
                    return p1 * ((z - mu2) * (z - mu2) - (z - mu1) * (z - mu1)) /
                           (2 * sigma * sigma);
                },
                lo, hi, 1e-13);
            if (std::abs(gaussian_kl(mu1, mu2, sigma) - quad) > 1e-8) {
                pass = false;
                detail += "kl quadrature miss; ";
            }
        }
        // Monte-Carlo inequality at 3 standard errors, 1e5 draws, 5 configurations
        struct Cfg {
            double shift, threshold, A;
        };
        const Cfg cfgs[5] = {{0.3, 0.0, 1.0},
                             {0.5, 0.5, 1.0},
                             {0.2, -0.5, 1.0},
                             {0.8, 1.0, 1.0},
                             {0.1, 0.2, 1.0}};
        const int n = 100000;
        int cfg_idx = 0;
        for (const Cfg& c : cfgs) {
            CounterRng draw(2000 + cfg_idx++, 0);
            double e0 = 0.0, em = 0.0;
            for (int i = 0; i < n; ++i) {
                const double z = draw.normal(static_cast<std::uint64_t>(i));
                e0 += z > c.threshold ? 1.0 : 0.0;
                em += z + c.shift > c.threshold ? 1.0 : 0.0;
            }
            e0 /= n;
            em /= n;
            const double bound = auer_gap(e0, c.A, gaussian_kl(0.0, c.shift, 1.0));
            const double se3 = 3.0 * std::sqrt(0.25 / n) * 2.0; // both estimates fluctuate
            if (!(em <= bound + se3)) {
                pass = false;
                detail += "transfer inequality miss at shift " + std::to_string(c.shift) + "; ";
            }
        }
        report(4, "kl-and-transfer-suite", pass, detail);
    }

    // 5. Divergence-bound dominance on the M=3 toy ensemble, 10 fixed policies
    {
        bool pass = true;
        std::string detail;
        const NeedleEnsemble toy = build_relaxed(KernelSpec{KernelFamily::Matern, 0.1, 1.5, 1},
                                                 0.05, 1.0);
        if (toy.M != 3) {
            pass = false;
            detail = "toy ensemble M=" + std::to_string(toy.M) + " (expected 3)";
        }
        const Grid grid(1, 64);
        const double sigma = 0.1;
        SequentialRng rng(77, 0);
        for (int policy = 0; policy < 10 && pass; ++policy) {
            std::vector<long long> sel;
            std::vector<long long> counts(static_cast<std::size_t>(toy.M), 0);
            for (int t = 0; t < 50; ++t) {
                const long long idx = static_cast<long long>(rng.below(64));
                sel.push_back(idx);
                counts[static_cast<std::size_t>(region_index(toy, grid.coords(idx)) - 1)]++;
            }
            for (long long m = 1; m <= toy.M; ++m) {
                const double exact = exact_kl_nonadaptive(toy, m, sel, grid, sigma);
                const double bound = divergence_bound(toy, m, counts, sigma);
                if (!(exact <= bound)) {
                    pass = false;
                    detail = "policy " + std::to_string(policy) + " member " + std::to_string(m);
                }
            }
        }
        report(5, "divergence-bound-dominance", pass, detail);
    }

    // 6. Normalized vbar sums vary by < 2x across eps in {0.1, 0.05, 0.02, 0.01}
    {
        const KernelSpec spec{KernelFamily::Matern, 0.1, 1.5, 1};
        double lo[3] = {1e300, 1e300, 1e300}, hi[3] = {0, 0, 0};
        for (double eps : {0.1, 0.05, 0.02, 0.01}) {
            const VbarSums sums = vbar_sums_report(build_relaxed(spec, eps, 1.0));
            const double vals[3] = {sums.max_over_m_sum_j, sums.max_over_j_sum_m,
                                    sums.max_over_j_sum_m_sq};
            for (int k = 0; k < 3; ++k) {
                lo[k] = std::min(lo[k], vals[k]);
                hi[k] = std::max(hi[k], vals[k]);
            }
        }
        const bool pass = hi[0] / lo[0] < 2.0 && hi[1] / lo[1] < 2.0 && hi[2] / lo[2] < 2.0;
        report(6, "vbar-sums-stability", pass,
               "ratios " + std::to_string(hi[0] / lo[0]) + ", " + std::to_string(hi[1] / lo[1]) +
                   ", " + std::to_string(hi[2] / lo[2]));
    }

    // 7. Uninformed-recommendation floor: average simple regret >= eps (M-1)/M
    {
        const NeedleEnsemble ens = build_relaxed(
            KernelSpec{KernelFamily::SquaredExponential, 0.1, 1.5, 1}, 0.02, 1.0);
        const Grid grid(1, 256);
        const double floor_value = uninformed_simple_regret(ens, grid);
        const double target = ens.epsilon * (ens.M - 1) / static_cast<double>(ens.M);
        report(7, "uninformed-recommendation-floor", floor_value >= target,
               "avg=" + std::to_string(floor_value) + " target=" + std::to_string(target) +
                   " M=" + std::to_string(ens.M));
    }

    // 8. Algorithm sanity: GP-UCB mean R_T/T decreasing, final simple regret < eps
    {
        const double eps = 0.1, sigma = 0.1;
        const NeedleEnsemble ens = build_relaxed(
            KernelSpec{KernelFamily::SquaredExponential, 0.2, 1.5, 1}, eps, 1.0);
        AlgorithmConfig cfg;
        cfg.kind = AlgorithmKind::GpUcb;
        cfg.grid_resolution = 256;
        cfg.seed = 0;
        const AverageReport rep = run_ensemble_average(ens, cfg, 1600, sigma, 5, 4);
        const double r100 = rep.mean_cum[99] / 100.0;
        const double r400 = rep.mean_cum[399] / 400.0;
        const double r1600 = rep.mean_cum[1599] / 1600.0;
        const bool decreasing = r100 > r400 && r400 > r1600;
        const bool simple_ok = rep.mean_final_simple < eps;
        report(8, "gp-ucb-sanity", decreasing && simple_ok,
               "R_T/T: " + std::to_string(r100) + " > " + std::to_string(r400) + " > " +
                   std::to_string(r1600) + ", simple=" + std::to_string(rep.mean_final_simple) +
                   " (M=" + std::to_string(ens.M) + ")");
    }

    // 9. Information-gain growth shapes
    {
        bool pass = true;
        std::string detail;
        const Grid grid(1, 256);
        std::vector<Point> pts;
        for (long long i = 0; i < grid.size(); ++i) pts.push_back(grid.point(i));

        const auto se_curve = info_gain_greedy(
            KernelSpec{KernelFamily::SquaredExponential, 0.2, 1.5, 1}, pts, 200, 0.1);
        double lo = 1e300, hi = 0.0;
        for (int T : {25, 50, 100, 200}) {
            const double ratio = se_curve[static_cast<std::size_t>(T - 1)].second /
                                 std::pow(std::log(static_cast<double>(T)), 2.0);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        pass = pass && hi / lo < 3.0;
        detail += "SE ratio spread " + std::to_string(hi / lo) + "  ";

        const auto ma_curve =
            info_gain_greedy(KernelSpec{KernelFamily::Matern, 0.2, 1.5, 1}, pts, 200, 0.1);
        std::vector<double> xs, ys;
        for (int T : {25, 50, 100, 200}) {
            xs.push_back(std::log(static_cast<double>(T)));
            ys.push_back(std::log(ma_curve[static_cast<std::size_t>(T - 1)].second));
        }
        const double slope = fit_slope(xs, ys);
        pass = pass && slope > 0.2;
        detail += "Matern log-log slope " + std::to_string(slope);
        report(9, "gamma-growth-shapes", pass, detail);
    }

    // 10. Exponent table: pinned Matern values and the SE log form
    {
        const ExponentTable ma = exponent_table(KernelSpec{KernelFamily::Matern, 1.0, 1.5, 1});
        const ExponentTable se =
            exponent_table(KernelSpec{KernelFamily::SquaredExponential, 1.0, 1.5, 1});
        const bool pass = ma.cumulative_lower.t_power == 0.625 &&
                          ma.cumulative_conjectured.t_power == 0.7 &&
                          se.cumulative_lower.form.find("sqrt(T (log T)^0.5)") !=
                              std::string::npos;
        report(10, "exponent-table", pass,
               "lower=" + std::to_string(ma.cumulative_lower.t_power) +
                   " conjectured=" + std::to_string(ma.cumulative_conjectured.t_power) +
                   " se_form=" + se.cumulative_lower.form);
    }

    // 11. Cumulative fixed point: residual < 1e-8 on (T, B, sigma) grid
    {
        bool pass = true;
        std::string detail;
        const KernelSpec spec{KernelFamily::SquaredExponential, 1.0, 1.5, 1};
        const auto prof = profile_for(1);
        for (double T : {1e3, 1e4}) {
            for (double sigma : {0.1, 1.0}) {
                const CumulativeLower cum = cumulative_regret_lower(spec, *prof, T, 1.0, sigma);
                if (!(cum.residual < 1e-8)) {
                    pass = false;
                    detail += "residual " + std::to_string(cum.residual) + " at T=" +
                              std::to_string(T) + " sigma=" + std::to_string(sigma) + "; ";
                }
            }
        }
        report(11, "theorem2-fixed-point", pass, detail);
    }

    // 12. Simulate determinism across reruns and worker counts (library level;
    //     the CLI test binary repeats this byte-for-byte on the emitted files)
    {
        const NeedleEnsemble ens = build_relaxed(KernelSpec{KernelFamily::Matern, 0.1, 1.5, 1},
                                                 0.05, 1.0);
        AlgorithmConfig cfg;
        cfg.kind = AlgorithmKind::GpUcb;
        cfg.grid_resolution = 64;
        cfg.seed = 9;
        const AverageReport one = run_ensemble_average(ens, cfg, 60, 0.1, 2, 1);
        const AverageReport one_again = run_ensemble_average(ens, cfg, 60, 0.1, 2, 1);
        const AverageReport four = run_ensemble_average(ens, cfg, 60, 0.1, 2, 4);
        bool pass = one.mean_cum == one_again.mean_cum && one.mean_cum == four.mean_cum &&
                    one.se_cum == four.se_cum && one.mean_final_simple == four.mean_final_simple;
        for (std::size_t e = 0; e < one.records.size() && pass; ++e) {
            pass = one.records[e].selections == four.records[e].selections &&
                   one.records[e].observations == four.records[e].observations;
        }
        report(12, "simulate-determinism", pass, "");
    }

    // Null-model sanity behind the criteria: Uniform observations against the
    // zero member pass a KS test at the 1% level (10^4 pooled samples).
    {
        const NeedleEnsemble ens = build_relaxed(KernelSpec{KernelFamily::Matern, 0.1, 1.5, 1},
                                                 0.05, 1.0);
        AlgorithmConfig cfg;
        cfg.kind = AlgorithmKind::Uniform;
        cfg.grid_resolution = 64;
        std::vector<double> pooled;
        const double sigma = 0.1;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const RegretRecord rec = run_episode(ens, 0, cfg, 1000, sigma, seed);
            pooled.insert(pooled.end(), rec.observations.begin(), rec.observations.end());
        }
        std::sort(pooled.begin(), pooled.end());
        const double n = static_cast<double>(pooled.size());
        double ks = 0.0;
        for (std::size_t i = 0; i < pooled.size(); ++i) {
            const double cdf = normal_cdf(pooled[i] / sigma);
            ks = std::max(ks, std::max(std::abs(cdf - i / n), std::abs(cdf - (i + 1) / n)));
        }
        report(0, "null-model-calibration", ks < 1.628 / std::sqrt(n),
               "ks=" + std::to_string(ks));
    }

    const auto elapsed = std::chrono::duration_cast<std::chrono::seconds>(
                             std::chrono::steady_clock::now() - t_start)
                             .count();
    std::printf("acceptance: %s (%d failing), %llds\n", failures == 0 ? "ALL PASS" : "FAILURES",
                failures, static_cast<long long>(elapsed));
    return failures == 0 ? 0 : 1;
}
