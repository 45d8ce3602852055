#include "needlebench/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "needlebench/bounds.hpp"

namespace needlebench {

namespace {

// Noise and algorithm randomness live on separate sub-streams of the
// (member, seed) key, so adding one never shifts the other.
constexpr std::uint64_t kNoiseStream = 0x6e6f6973ULL;
constexpr std::uint64_t kAlgoStream = 0x616c676fULL;

std::uint64_t episode_key(std::uint64_t seed, long long m) {
    return seed * 0x100000001b3ULL + static_cast<std::uint64_t>(m);
}

} // namespace

EpisodeContext make_episode_context(const NeedleEnsemble& ens, const AlgorithmConfig& cfg,
                                    int T, double sigma) {
    EpisodeContext ctx;
    ctx.grid = Grid(ens.spec.d, cfg.grid_resolution);
    const long long g = ctx.grid.size();
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(g));
    for (long long i = 0; i < g; ++i) pts.push_back(ctx.grid.point(i));
    ctx.grid_cov = std::make_shared<Eigen::MatrixXd>(kernel_matrix(ens.spec, pts));

    auto gamma = std::make_shared<std::vector<double>>();
    if (cfg.kind == AlgorithmKind::GpUcb || cfg.kind == AlgorithmKind::Elimination) {
        if (cfg.beta.kind == BetaSchedule::Kind::TheoreticalRkhs) {
            const auto curve = info_gain_greedy_from_cov(*ctx.grid_cov, T, sigma);
            gamma->resize(static_cast<std::size_t>(T) + 1, 0.0);
            for (const auto& [t, val] : curve) (*gamma)[static_cast<std::size_t>(t)] = val;
        }
    }
    ctx.gamma = gamma;
    return ctx;
}

RegretRecord run_episode(const NeedleEnsemble& ens, long long m, const AlgorithmConfig& cfg,
                         int T, double sigma, std::uint64_t seed) {
    return run_episode(ens, m, cfg, T, sigma, seed, make_episode_context(ens, cfg, T, sigma));
}

RegretRecord run_episode(const NeedleEnsemble& ens, long long m, const AlgorithmConfig& cfg,
                         int T, double sigma, std::uint64_t seed, const EpisodeContext& ctx) {
    if (T < 0) throw ParameterError("horizon must be nonnegative");
    if (!(sigma > 0.0)) throw ParameterError("noise level sigma must be positive");
    if (m < 0 || m > ens.M) throw ParameterError("member index out of range");

    const Grid& grid = ctx.grid;
    const long long g = grid.size();

    // Needle values over the decision grid; x* is its lexicographic argmax.
    Eigen::VectorXd f(g);
    for (long long i = 0; i < g; ++i) f(i) = eval_needle(ens, m, grid.coords(i));
    const long long x_star = lex_argmax(f);
    const double f_star = f(x_star);

    RegretRecord rec;
    rec.m = m;
    rec.seed = seed;
    rec.T = T;
    rec.x_star = x_star;
    rec.x_star_bias = m >= 1 ? 2.0 * ens.epsilon - f_star : 0.0;
    rec.region_counts.assign(static_cast<std::size_t>(ens.M), 0);
    rec.selections.reserve(T);
    rec.observations.reserve(T);
    rec.inst_regret.reserve(T);
    rec.cum_regret.reserve(T);
    rec.simple_curve.reserve(T);

    const std::uint64_t key = episode_key(seed, m);
    CounterRng noise(key, kNoiseStream);
    SequentialRng algo_rng(key, kAlgoStream);

    GridPosterior gp(*ctx.grid_cov, sigma * sigma);
    std::vector<char> survivors(static_cast<std::size_t>(g), 1);

    const double beta_delta = cfg.beta.delta;
    double cum = 0.0;
    for (int t = 1; t <= T; ++t) {
        long long pick = 0;
        switch (cfg.kind) {
            case AlgorithmKind::Uniform:
                pick = static_cast<long long>(algo_rng.below(static_cast<std::uint64_t>(g)));
                break;
            case AlgorithmKind::Oracle:
                pick = m >= 1 ? x_star : grid.midpoint_index();
                break;
            case AlgorithmKind::GpUcb:
            case AlgorithmKind::Elimination: {
                const double gamma_prev =
                    cfg.beta.kind == BetaSchedule::Kind::TheoreticalRkhs && t >= 2
                        ? (*ctx.gamma)[static_cast<std::size_t>(t - 1)]
                        : 0.0;
                const double bs = cfg.beta.kind == BetaSchedule::Kind::Constant
                                      ? cfg.beta.c
                                      : beta_sqrt_theoretical(ens.B, sigma, gamma_prev, beta_delta);
                const Eigen::VectorXd sd = gp.variances().cwiseMax(0.0).cwiseSqrt();
                const Eigen::VectorXd ucb = gp.means() + bs * sd;
                if (cfg.kind == AlgorithmKind::GpUcb) {
                    pick = lex_argmax(ucb);
                } else {
                    eliminate_cells(gp.means(), sd, bs, survivors);
                    pick = pick_survivor(survivors, ucb, algo_rng);
                }
                break;
            }
        }

        const double y = f(pick) + sigma * noise.normal(static_cast<std::uint64_t>(t));
        gp.observe(pick, y);

        rec.selections.push_back(pick);
        rec.observations.push_back(y);
        const double r = m >= 1 ? f_star - f(pick) : 0.0;
        rec.inst_regret.push_back(r);
        cum += r;
        rec.cum_regret.push_back(cum);
        rec.region_counts[static_cast<std::size_t>(region_index(ens, grid.coords(pick)) - 1)]++;
        const long long running_rec = lex_argmax(gp.means());
        rec.simple_curve.push_back(m >= 1 ? f_star - f(running_rec) : 0.0);
    }

    rec.recommendation = recommend_from_means(gp.means(), grid, T);
    rec.simple_regret = m >= 1 ? f_star - f(rec.recommendation) : 0.0;
    return rec;
}

AverageReport run_ensemble_average(const NeedleEnsemble& ens, const AlgorithmConfig& cfg, int T,
                                   double sigma, int seeds_per_member, int workers) {
    if (seeds_per_member < 1) throw ParameterError("seeds_per_member must be at least 1");
    const EpisodeContext ctx = make_episode_context(ens, cfg, T, sigma);

    const long long n_ep = ens.M * seeds_per_member;
    std::vector<RegretRecord> records(static_cast<std::size_t>(n_ep));
    auto run_range = [&](long long begin, long long end) {
        for (long long i = begin; i < end; ++i) {
            const long long m = i / seeds_per_member + 1;
            const std::uint64_t seed = cfg.seed * 1000003ULL +
                                       static_cast<std::uint64_t>(i % seeds_per_member);
            records[static_cast<std::size_t>(i)] = run_episode(ens, m, cfg, T, sigma, seed, ctx);
        }
    };
    if (workers <= 1 || n_ep <= 1) {
        run_range(0, n_ep);
    } else {
        const int nw = static_cast<int>(std::min<long long>(workers, n_ep));
        std::vector<std::thread> pool;
        const long long chunk = (n_ep + nw - 1) / nw;
        for (int wi = 0; wi < nw; ++wi)
            pool.emplace_back(run_range, wi * chunk, std::min(n_ep, (wi + 1) * chunk));
        for (auto& th : pool) th.join();
    }

    AverageReport rep;
    rep.T = T;
    rep.episodes = n_ep;
    // Fixed-order pairwise reduction over the (m, seed)-sorted records; the
    // result is bit-identical whatever the worker count.
    auto reduce = [&](auto&& get) {
        std::vector<double> acc(static_cast<std::size_t>(n_ep));
        for (long long i = 0; i < n_ep; ++i) acc[static_cast<std::size_t>(i)] = get(records[i]);
        for (std::size_t stride = 1; stride < acc.size(); stride *= 2)
            for (std::size_t i = 0; i + stride < acc.size(); i += 2 * stride) acc[i] += acc[i + stride];
        return acc[0];
    };
    auto curve_stats = [&](auto&& get, std::vector<double>& mean, std::vector<double>& se) {
        mean.resize(T);
        se.resize(T);
        for (int t = 0; t < T; ++t) {
            const double mu = reduce([&](const RegretRecord& r) { return get(r)[t]; }) / n_ep;
            double ss = 0.0;
            for (const RegretRecord& r : records) {
                const double dev = get(r)[t] - mu;
                ss += dev * dev;
            }
            mean[t] = mu;
            se[t] = n_ep > 1 ? std::sqrt(ss / (n_ep - 1) / n_ep) : 0.0;
        }
    };
    curve_stats([](const RegretRecord& r) -> const std::vector<double>& { return r.inst_regret; },
                rep.mean_inst, rep.se_inst);
    curve_stats([](const RegretRecord& r) -> const std::vector<double>& { return r.cum_regret; },
                rep.mean_cum, rep.se_cum);
    curve_stats([](const RegretRecord& r) -> const std::vector<double>& { return r.simple_curve; },
                rep.mean_simple, rep.se_simple);
    const double mu = reduce([](const RegretRecord& r) { return r.simple_regret; }) / n_ep;
    double ss = 0.0;
    for (const RegretRecord& r : records) ss += (r.simple_regret - mu) * (r.simple_regret - mu);
    rep.mean_final_simple = mu;
    rep.se_final_simple = n_ep > 1 ? std::sqrt(ss / (n_ep - 1) / n_ep) : 0.0;
    rep.records = std::move(records);
    return rep;
}

double divergence_bound(const NeedleEnsemble& ens, long long m,
                        const std::vector<long long>& region_counts, double sigma) {
    if (m < 1 || m > ens.M) throw ParameterError("member index out of range");
    if (static_cast<long long>(region_counts.size()) != ens.M)
        throw ParameterError("region_counts size must equal M");
    if (!(sigma > 0.0)) throw ParameterError("noise level sigma must be positive");
    double total = 0.0;
    for (long long j = 1; j <= ens.M; ++j) {
        const double v = vbar(ens, m, j);
        total += static_cast<double>(region_counts[static_cast<std::size_t>(j - 1)]) * v * v;
    }
    return total / (2.0 * sigma * sigma);
}

double exact_kl_nonadaptive(const NeedleEnsemble& ens, long long m,
                            const std::vector<long long>& selections, const Grid& grid,
                            double sigma) {
    double total = 0.0;
    for (long long idx : selections) {
        const double v = eval_needle(ens, m, grid.coords(idx));
        total += v * v;
    }
    return total / (2.0 * sigma * sigma);
}

double uninformed_simple_regret(const NeedleEnsemble& ens, const Grid& grid) {
    const long long g = grid.size();
    const long long mid = grid.midpoint_index();
    double total = 0.0;
    for (long long m = 1; m <= ens.M; ++m) {
        double best = -std::numeric_limits<double>::infinity();
        for (long long i = 0; i < g; ++i)
            best = std::max(best, eval_needle(ens, m, grid.coords(i)));
        total += best - eval_needle(ens, m, grid.coords(mid));
    }
    return total / static_cast<double>(ens.M);
}

} // namespace needlebench
