#include "needlebench/gp.hpp"

#include <cmath>

#include "needlebench/errors.hpp"

namespace needlebench {

Grid::Grid(int dim, int resolution) : d(dim), res(resolution) {
    if (d < 1) throw ParameterError("grid dimension must be at least 1");
    if (res < 2) throw ParameterError("grid resolution must be at least 2");
}

long long Grid::size() const {
    long long s = 1;
    for (int k = 0; k < d; ++k) s *= res;
    return s;
}

Point Grid::point(long long i) const {
    Point x(d);
    for (int k = d - 1; k >= 0; --k) {
        x(k) = static_cast<double>(i % res) / (res - 1);
        i /= res;
    }
    return x;
}

std::vector<double> Grid::coords(long long i) const {
    const Point p = point(i);
    return std::vector<double>(p.data(), p.data() + p.size());
}

long long Grid::midpoint_index() const {
    long long i = 0;
    for (int k = 0; k < d; ++k) i = i * res + (res - 1) / 2;
    return i;
}

GPState::GPState(const KernelSpec& spec, double noise_var) : spec_(spec), noise_var_(noise_var) {
    spec_.validate();
    if (!(noise_var > 0.0)) throw ParameterError("noise variance must be positive");
    y_.resize(16);
    u_.resize(16);
    L_ = Eigen::MatrixXd::Zero(16, 16);
}

Eigen::VectorXd GPState::cross_covariances(const Point& x) const {
    Eigen::VectorXd k(n_);
    for (int i = 0; i < n_; ++i) k(i) = eval_kernel(spec_, X_[i], x);
    return k;
}

void GPState::add_observation(const Point& x, double y) {
    if (x.size() != spec_.d) throw ParameterError("point dimension does not match kernel spec");
    if (n_ == L_.rows()) {
        const int cap = 2 * n_;
        Eigen::MatrixXd L2 = Eigen::MatrixXd::Zero(cap, cap);
        L2.topLeftCorner(n_, n_) = L_.topLeftCorner(n_, n_);
        L_.swap(L2);
        y_.conservativeResize(cap);
        u_.conservativeResize(cap);
    }
    const Eigen::VectorXd k = cross_covariances(x);
    Eigen::VectorXd a(n_);
    if (n_ > 0)
        a = L_.topLeftCorner(n_, n_).triangularView<Eigen::Lower>().solve(k);
    double d2 = eval_kernel(spec_, x, x) + noise_var_ - a.squaredNorm();
    if (d2 <= 0.0) {
        // sigma^2 is the only planned regularizer; escalate jitter only on breakdown
        double jitter = 1e-10;
        while (d2 + jitter <= 0.0 && jitter < 1e-6) jitter *= 10.0;
        if (d2 + jitter <= 0.0)
            throw NumericError("covariance factorization lost positive definiteness");
        d2 += jitter;
    }
    const double diag = std::sqrt(d2);
    L_.row(n_).head(n_) = a.transpose();
    L_(n_, n_) = diag;
    y_(n_) = y;
    u_(n_) = (y - a.dot(u_.head(n_))) / diag;
    X_.push_back(x);
    ++n_;
}

std::pair<double, double> GPState::posterior(const Point& x) const {
    const double prior_var = eval_kernel(spec_, x, x);
    if (n_ == 0) return {0.0, std::sqrt(prior_var)};
    const Eigen::VectorXd k = cross_covariances(x);
    const Eigen::VectorXd a = L_.topLeftCorner(n_, n_).triangularView<Eigen::Lower>().solve(k);
    const double mean = a.dot(u_.head(n_));
    const double s2 = prior_var - a.squaredNorm();
    return {mean, std::sqrt(std::max(s2, 0.0))};
}

double GPState::factorization_residual() const {
    if (n_ == 0) return 0.0;
    Eigen::MatrixXd K(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) K(i, j) = eval_kernel(spec_, X_[i], X_[j]);
    K.diagonal().array() += noise_var_;
    const Eigen::MatrixXd L =
        L_.topLeftCorner(n_, n_).triangularView<Eigen::Lower>();
    return (L * L.transpose() - K).cwiseAbs().maxCoeff();
}

double gp_posterior_mean(const GPState& state, const Point& x) { return state.posterior(x).first; }
double gp_posterior_stddev(const GPState& state, const Point& x) {
    return state.posterior(x).second;
}

GridPosterior::GridPosterior(const KernelSpec& spec, const Grid& grid, double noise_var)
    : noise_var_(noise_var) {
    if (!(noise_var > 0.0)) throw ParameterError("noise variance must be positive");
    const long long g = grid.size();
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(g));
    for (long long i = 0; i < g; ++i) pts.push_back(grid.point(i));
    P_ = kernel_matrix(spec, pts);
    mu_ = Eigen::VectorXd::Zero(g);
}

GridPosterior::GridPosterior(Eigen::MatrixXd prior_cov, double noise_var)
    : P_(std::move(prior_cov)), mu_(Eigen::VectorXd::Zero(P_.rows())), noise_var_(noise_var) {
    if (!(noise_var > 0.0)) throw ParameterError("noise variance must be positive");
}

void GridPosterior::observe(long long i, double y) {
    const double s2 = P_(i, i) + noise_var_;
    const Eigen::VectorXd col = P_.col(i);
    mu_ += col * ((y - mu_(i)) / s2);
    P_.noalias() -= (col / s2) * col.transpose();
}

long long lex_argmax(const Eigen::VectorXd& values) {
    long long best = 0;
    for (long long i = 1; i < values.size(); ++i)
        if (values(i) > values(best)) best = i;
    return best;
}

} // namespace needlebench
