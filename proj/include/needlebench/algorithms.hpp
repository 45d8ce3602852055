#pragma once

#include <cstdint>
#include <vector>

#include "needlebench/gp.hpp"
#include "needlebench/rng.hpp"

namespace needlebench {

enum class AlgorithmKind { GpUcb, Uniform, Elimination, Oracle };

struct BetaSchedule {
    enum class Kind { Constant, TheoreticalRkhs } kind = Kind::TheoreticalRkhs;
    double c = 1.0;      // sqrt(beta_t) for Constant
    double delta = 0.1;  // confidence level for TheoreticalRkhs
};

struct AlgorithmConfig {
    AlgorithmKind kind = AlgorithmKind::GpUcb;
    BetaSchedule beta;
    int grid_resolution = 256;
    std::uint64_t seed = 0;
};

// sqrt(beta_t) = B + sigma sqrt(2 (gamma_{t-1} + 1 + ln(1/delta))).
double beta_sqrt_theoretical(double B, double sigma, double gamma_prev, double delta);

// Round-scoped inputs that the stateless selection rule needs besides the GP.
struct SelectContext {
    Grid grid;
    double B = 1.0;
    double sigma = 1.0;
    double gamma_prev = 0.0;             // greedy information-gain estimate at t-1
    SequentialRng* rng = nullptr;        // seeded stream for randomized rules
    std::vector<char>* survivors = nullptr; // Elimination working set (grid-sized)
    long long oracle_index = -1;         // Oracle diagnostic rule target
};

// Next point to query, as a grid index.  GP-UCB takes the lexicographically
// smallest argmax of mean + sqrt(beta) sd; Uniform draws from the seeded
// stream; Elimination samples the surviving set after discarding every grid
// point whose UCB falls below the best LCB.
long long select_next(const AlgorithmConfig& cfg, const GPState& state, int t,
                      SelectContext& ctx);

// Final recommendation: posterior-mean argmax over the grid (lexicographic
// ties); with no observations, the grid midpoint.
long long recommend(const GPState& state, const Grid& grid);

// Recommendation from precomputed grid means.
long long recommend_from_means(const Eigen::VectorXd& means, const Grid& grid, int observations);

// Elimination rule shared by the GPState and GridPosterior paths.
void eliminate_cells(const Eigen::VectorXd& means, const Eigen::VectorXd& sds, double beta_sqrt,
                     std::vector<char>& survivors);
long long pick_survivor(const std::vector<char>& survivors, const Eigen::VectorXd& ucb,
                        SequentialRng& rng);

} // namespace needlebench
