#pragma once

#include <Eigen/Dense>
#include <vector>

#include "needlebench/kernels.hpp"

namespace needlebench {

// Uniform decision grid over [0,1]^d with `res` points per dimension,
// endpoints included.  Linear index order equals lexicographic order of the
// coordinate tuples (dimension 0 most significant).
struct Grid {
    int d = 1;
    int res = 2;

    Grid() = default;
    Grid(int dim, int resolution);

    long long size() const;
    Point point(long long i) const;
    std::vector<double> coords(long long i) const;
    long long midpoint_index() const; // per-dimension index (res - 1) / 2
};

// Gaussian-process regression state with the observation-side Cholesky factor
// of (K_t + sigma^2 I) maintained incrementally.
class GPState {
public:
    GPState(const KernelSpec& spec, double noise_var);

    const KernelSpec& spec() const { return spec_; }
    double noise_var() const { return noise_var_; }
    int count() const { return n_; }
    const std::vector<Point>& observed_points() const { return X_; }
    Eigen::VectorXd observed_values() const { return y_.head(n_); }

    void add_observation(const Point& x, double y);

    // Posterior mean and standard deviation at x.
    std::pair<double, double> posterior(const Point& x) const;

    // max |(L L^T - (K + sigma^2 I))_{ij}|, for the factorization invariant.
    double factorization_residual() const;

    // Lower-triangular factor (n x n).
    Eigen::MatrixXd factor() const {
        return Eigen::MatrixXd(L_.topLeftCorner(n_, n_).triangularView<Eigen::Lower>());
    }

private:
    Eigen::VectorXd cross_covariances(const Point& x) const;

    KernelSpec spec_;
    double noise_var_;
    int n_ = 0;
    std::vector<Point> X_;
    Eigen::VectorXd y_;
    Eigen::VectorXd u_; // L^{-1} y, grown alongside the factor
    Eigen::MatrixXd L_;
};

double gp_posterior_mean(const GPState& state, const Point& x);
double gp_posterior_stddev(const GPState& state, const Point& x);

// Sequentially conditioned posterior restricted to a fixed finite grid:
// rank-one updates of the full grid covariance.  Exact for selections and
// queries on the grid, and O(G^2) per observation independent of t.
class GridPosterior {
public:
    GridPosterior(const KernelSpec& spec, const Grid& grid, double noise_var);
    GridPosterior(Eigen::MatrixXd prior_cov, double noise_var); // pre-built K

    void observe(long long grid_index, double y);

    double mean(long long i) const { return mu_(i); }
    double variance(long long i) const { return P_(i, i); }
    const Eigen::VectorXd& means() const { return mu_; }
    Eigen::VectorXd variances() const { return P_.diagonal(); }
    long long size() const { return mu_.size(); }

private:
    Eigen::MatrixXd P_;
    Eigen::VectorXd mu_;
    double noise_var_;
};

// Index of the lexicographically smallest argmax of `values`.
long long lex_argmax(const Eigen::VectorXd& values);

} // namespace needlebench
