#include "needlebench/algorithms.hpp"

#include <cmath>
#include <limits>

#include "needlebench/errors.hpp"

namespace needlebench {

double beta_sqrt_theoretical(double B, double sigma, double gamma_prev, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0,1)");
    return B + sigma * std::sqrt(2.0 * (gamma_prev + 1.0 + std::log(1.0 / delta)));
}

namespace {

double beta_sqrt_for(const AlgorithmConfig& cfg, const SelectContext& ctx) {
    if (cfg.beta.kind == BetaSchedule::Kind::Constant) {
        if (!(cfg.beta.c > 0.0)) throw ParameterError("constant beta must be positive");
        return cfg.beta.c;
    }
    return beta_sqrt_theoretical(ctx.B, ctx.sigma, ctx.gamma_prev, cfg.beta.delta);
}

} // namespace

void eliminate_cells(const Eigen::VectorXd& means, const Eigen::VectorXd& sds, double beta_sqrt,
                     std::vector<char>& survivors) {
    const long long g = means.size();
    double best_lcb = -std::numeric_limits<double>::infinity();
    for (long long i = 0; i < g; ++i)
        best_lcb = std::max(best_lcb, means(i) - beta_sqrt * sds(i));
    for (long long i = 0; i < g; ++i) {
        if (means(i) + beta_sqrt * sds(i) < best_lcb) survivors[static_cast<std::size_t>(i)] = 0;
    }
}

long long pick_survivor(const std::vector<char>& survivors, const Eigen::VectorXd& ucb,
                        SequentialRng& rng) {
    long long alive = 0;
    for (char s : survivors) alive += s ? 1 : 0;
    if (alive == 0) return lex_argmax(ucb); // fallback: global UCB argmax
    long long pick = static_cast<long long>(rng.below(static_cast<std::uint64_t>(alive)));
    for (std::size_t i = 0; i < survivors.size(); ++i) {
        if (!survivors[i]) continue;
        if (pick-- == 0) return static_cast<long long>(i);
    }
    return lex_argmax(ucb);
}

long long select_next(const AlgorithmConfig& cfg, const GPState& state, int t,
                      SelectContext& ctx) {
    if (t < 1) throw ParameterError("round index must be at least 1");
    const long long g = ctx.grid.size();
    switch (cfg.kind) {
        case AlgorithmKind::Uniform: {
            if (!ctx.rng) throw ParameterError("Uniform selection needs a seeded stream");
            return static_cast<long long>(ctx.rng->below(static_cast<std::uint64_t>(g)));
        }
        case AlgorithmKind::Oracle:
            if (ctx.oracle_index < 0) throw ParameterError("Oracle selection needs a target index");
            return ctx.oracle_index;
        case AlgorithmKind::GpUcb:
        case AlgorithmKind::Elimination: {
            Eigen::VectorXd mu(g), sd(g);
            for (long long i = 0; i < g; ++i) {
                const auto [m, s] = state.posterior(ctx.grid.point(i));
                mu(i) = m;
                sd(i) = s;
            }
            const double bs = beta_sqrt_for(cfg, ctx);
            const Eigen::VectorXd ucb = mu + bs * sd;
            if (cfg.kind == AlgorithmKind::GpUcb) return lex_argmax(ucb);
            if (!ctx.survivors || static_cast<long long>(ctx.survivors->size()) != g)
                throw ParameterError("Elimination needs a grid-sized survivor set");
            if (!ctx.rng) throw ParameterError("Elimination selection needs a seeded stream");
            eliminate_cells(mu, sd, bs, *ctx.survivors);
            return pick_survivor(*ctx.survivors, ucb, *ctx.rng);
        }
    }
    throw ParameterError("unknown algorithm kind");
}

long long recommend(const GPState& state, const Grid& grid) {
    if (state.count() == 0) return grid.midpoint_index();
    const long long g = grid.size();
    Eigen::VectorXd mu(g);
    for (long long i = 0; i < g; ++i) mu(i) = state.posterior(grid.point(i)).first;
    return lex_argmax(mu);
}

long long recommend_from_means(const Eigen::VectorXd& means, const Grid& grid, int observations) {
    if (observations == 0) return grid.midpoint_index();
    return lex_argmax(means);
}

} // namespace needlebench
