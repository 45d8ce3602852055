#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "needlebench/algorithms.hpp"
#include "needlebench/ensemble.hpp"
#include "needlebench/gp.hpp"

namespace needlebench {

// One noisy bandit episode against ensemble member m (m = 0: zero function,
// used only to estimate the reference-measure visit counts).
struct RegretRecord {
    long long m = 0;
    std::uint64_t seed = 0;
    int T = 0;
    std::vector<long long> selections;    // grid indices, one per round
    std::vector<double> observations;     // y_t = f(x_t) + N(0, sigma^2)
    std::vector<double> inst_regret;      // r_t = f(x*) - f(x_t); zero for m = 0
    std::vector<double> cum_regret;       // running sums R_t
    std::vector<double> simple_curve;     // f(x*) - f(argmax mu_t), per round
    std::vector<long long> region_counts; // N_j, size M
    long long recommendation = 0;         // grid index of x^{(T)}
    double simple_regret = 0.0;           // f(x*) - f(x^{(T)})
    long long x_star = 0;                 // grid argmax of f_m
    double x_star_bias = 0.0;             // 2 eps - f_m(x*): grid quantization gap
};

// Shared per-configuration state so episode batches do not recompute the grid
// covariance or the information-gain curve.
struct EpisodeContext {
    Grid grid;
    std::shared_ptr<const Eigen::MatrixXd> grid_cov;     // K over grid points
    std::shared_ptr<const std::vector<double>> gamma;    // greedy gamma_hat, gamma[t] for t >= 1
};
EpisodeContext make_episode_context(const NeedleEnsemble& ens, const AlgorithmConfig& cfg,
                                    int T, double sigma);

RegretRecord run_episode(const NeedleEnsemble& ens, long long m, const AlgorithmConfig& cfg,
                         int T, double sigma, std::uint64_t seed);
RegretRecord run_episode(const NeedleEnsemble& ens, long long m, const AlgorithmConfig& cfg,
                         int T, double sigma, std::uint64_t seed, const EpisodeContext& ctx);

// Uniform average over members 1..M and seeds 0..seeds_per_member-1, with
// standard errors; the reduction order is fixed by (m, seed) regardless of
// the worker count.
struct AverageReport {
    int T = 0;
    long long episodes = 0;
    std::vector<double> mean_inst, se_inst;
    std::vector<double> mean_cum, se_cum;
    std::vector<double> mean_simple, se_simple; // per-round recommendation regret
    double mean_final_simple = 0.0, se_final_simple = 0.0;
    std::vector<RegretRecord> records; // (m, seed) order
};
AverageReport run_ensemble_average(const NeedleEnsemble& ens, const AlgorithmConfig& cfg, int T,
                                   double sigma, int seeds_per_member, int workers = 1);

// Sum_j N_j vbar_m^j)^2 / (2 sigma^2): the divergence bound instantiated with
// the Gaussian KL and the vbar table.
double divergence_bound(const NeedleEnsemble& ens, long long m,
                        const std::vector<long long>& region_counts, double sigma);

// Exact KL D(P_0 || P_m) for a fixed (non-adaptive) selection sequence.
double exact_kl_nonadaptive(const NeedleEnsemble& ens, long long m,
                            const std::vector<long long>& selections, const Grid& grid,
                            double sigma);

// Average over members of f_m(x*) - f_m(grid midpoint): the zero-observation
// recommendation floor, computed from needle values alone.
double uninformed_simple_regret(const NeedleEnsemble& ens, const Grid& grid);

} // namespace needlebench
