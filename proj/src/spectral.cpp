#include "needlebench/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "needlebench/csv.hpp"
#include "needlebench/quadrature.hpp"

namespace needlebench {

namespace {
constexpr double kPi = 3.14159265358979323846;

// One radial evaluation of the Hankel-reduced inverse transform,
//   h(r) = 2 pi r^{-(d/2-1)} \int_0^1 H(rho) J_{d/2-1}(2 pi r rho) rho^{d/2} drho,
// with the d = 1 case reducing to the cosine transform and r = 0 to the
// surface-area formula.
double transform_at(int d, double r, const QuadRule& rule) {
    const int n = static_cast<int>(rule.nodes.size());
    double sum = 0.0;
    if (r < 1e-9) {
        for (int i = 0; i < n; ++i) {
            const double rho = rule.nodes[i];
            sum += rule.weights[i] * bump_value_radial(rho) * std::pow(rho, d - 1);
        }
        return unit_sphere_area(d) * sum;
    }
    if (d == 1) {
        for (int i = 0; i < n; ++i) {
            const double rho = rule.nodes[i];
            sum += rule.weights[i] * bump_value_radial(rho) * std::cos(2.0 * kPi * r * rho);
        }
        return 2.0 * sum;
    }
    const double order = 0.5 * d - 1.0;
    for (int i = 0; i < n; ++i) {
        const double rho = rule.nodes[i];
        sum += rule.weights[i] * bump_value_radial(rho) *
               std::cyl_bessel_j(order, 2.0 * kPi * r * rho) * std::pow(rho, 0.5 * d);
    }
    return 2.0 * kPi * std::pow(r, -order) * sum;
}

std::vector<double> tabulate(int d, const std::vector<double>& r_grid, int n_quad) {
    const QuadRule& rule = gauss_legendre(n_quad);
    std::vector<double> h(r_grid.size());
    for (std::size_t i = 0; i < r_grid.size(); ++i) h[i] = transform_at(d, r_grid[i], rule);
    return h;
}

// Fritsch-Carlson monotone cubic slopes.
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> delta(n - 1), m(n);
    for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    m[0] = delta[0];
    m[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            m[i] = 0.0;
        } else {
            const double w1 = 2.0 * (x[i + 1] - x[i]) + (x[i] - x[i - 1]);
            const double w2 = (x[i + 1] - x[i]) + 2.0 * (x[i] - x[i - 1]);
            m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    // Clamp endpoint slopes to preserve monotonicity on the boundary intervals.
    for (std::size_t i : {std::size_t{0}, n - 1}) {
        const double del = (i == 0) ? delta[0] : delta[n - 2];
        if (m[i] * del <= 0.0)
            m[i] = 0.0;
        else if (std::abs(m[i]) > 3.0 * std::abs(del))
            m[i] = 3.0 * del;
    }
    return m;
}

} // namespace

double bump_value_squared_radius(double s) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw ParameterError("squared radius must be finite and nonnegative");
    if (s >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - s));
}

double bump_value_radial(double rho) { return bump_value_squared_radius(rho * rho); }

double bump_value(const std::vector<double>& xi) {
    double s = 0.0;
    for (double v : xi) {
        if (!std::isfinite(v)) throw ParameterError("frequency must have finite coordinates");
        s += v * v;
    }
    return bump_value_squared_radius(s);
}

double BumpProfile::eval(double r) const {
    if (!(r >= 0.0)) throw ParameterError("radius must be nonnegative");
    if (r >= r_max) return 0.0;
    const auto it = std::upper_bound(r_grid.begin(), r_grid.end(), r);
    const std::size_t i = static_cast<std::size_t>(it - r_grid.begin()) - 1;
    const double hstep = r_grid[i + 1] - r_grid[i];
    const double t = (r - r_grid[i]) / hstep;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * h_values[i] + h10 * hstep * slopes[i] + h01 * h_values[i + 1] +
           h11 * hstep * slopes[i + 1];
}

double BumpProfile::tail_sup(double r) const {
    if (r >= r_max) return 0.0;
    const auto it = std::upper_bound(r_grid.begin(), r_grid.end(), r);
    std::size_t i = static_cast<std::size_t>(it - r_grid.begin());
    if (i > 0) --i; // left node covers the whole interval [r_i, inf)
    return suffix_max[i];
}

BumpProfile inverse_transform_profile(int d, const ProfileOptions& opts) {
    if (d < 1) throw ParameterError("dimension d must be at least 1");
    if (!(opts.r_max > 0.0)) throw ParameterError("r_max must be positive");
    if (opts.n_r < 64 || opts.n_quad < 64) throw ParameterError("n_r and n_quad must be at least 64");

    BumpProfile p;
    p.d = d;
    p.r_max = opts.r_max;
    p.r_grid.resize(opts.n_r);
    for (int i = 0; i < opts.n_r; ++i) p.r_grid[i] = opts.r_max * i / (opts.n_r - 1.0);

    int n_quad = opts.n_quad;
    std::vector<double> h = tabulate(d, p.r_grid, n_quad);
    bool converged = false;
    for (int k = 0; k < opts.max_doublings; ++k) {
        const std::vector<double> h2 = tabulate(d, p.r_grid, 2 * n_quad);
        double sup = 0.0;
        for (std::size_t i = 0; i < h.size(); ++i) sup = std::max(sup, std::abs(h2[i] - h[i]));
        h = h2;
        n_quad *= 2;
        if (sup <= opts.sup_tol) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw AccuracyError("bump transform quadrature did not stabilize under node doubling");

    p.h_values = std::move(h);
    p.quadrature_nodes = n_quad;
    p.h0 = p.h_values[0];
    if (!(p.h0 > 0.0)) throw AccuracyError("h(0) must be positive");
    for (double v : p.h_values) {
        if (std::abs(v) > p.h0 * (1.0 + 1e-12))
            throw AccuracyError("tabulated |h| exceeds h(0); transform is inconsistent");
    }
    if (std::abs(p.h_values.back()) >= 1e-6 * p.h0)
        throw std::domain_error("profile has not decayed below 1e-6 h0 at r_max; enlarge r_max");

    p.slopes = pchip_slopes(p.r_grid, p.h_values);
    p.suffix_max.assign(p.h_values.size(), 0.0);
    double run = 0.0; // h == 0 beyond r_max, so the running max is floored at 0
    for (std::size_t i = p.h_values.size(); i-- > 0;) {
        run = std::max(run, p.h_values[i]);
        p.suffix_max[i] = run;
    }

    // sup |h''| <= (2 pi)^2 S_{d-1} \int rho^{d+1} H(rho) drho, by differentiating
    // under the transform; used to pad interval bounds taken from the table.
    const double moment = integrate_adaptive(
                              [&](double rho) { return bump_value_radial(rho) * std::pow(rho, d + 1); },
                              0.0, 1.0, 1e-10)
                              .value;
    p.second_derivative_bound = 4.0 * kPi * kPi * unit_sphere_area(d) * moment;

    p.zeta = half_width(p);
    // The true h0/2 crossing sits between zeta and the next node; the node
    // after the crossing certifies the half-radius from above (between-node
    // overshoot is bounded by the curvature term, far below the local slope).
    {
        const auto it = std::upper_bound(p.r_grid.begin(), p.r_grid.end(), p.zeta);
        p.zeta_outer = *it;
    }
    return p;
}

double half_width(const BumpProfile& profile) {
    const double target = 0.5 * profile.h0;
    std::size_t last_at_or_above = 0;
    for (std::size_t i = 0; i < profile.h_values.size(); ++i) {
        if (profile.h_values[i] >= target) last_at_or_above = i;
    }
    if (last_at_or_above + 1 == profile.h_values.size())
        throw std::domain_error("profile has not decayed below h0/2 within r_max; enlarge r_max");
    return profile.r_grid[last_at_or_above];
}

std::string profile_to_csv(const BumpProfile& profile) {
    std::string out = "r,h\n";
    for (std::size_t i = 0; i < profile.r_grid.size(); ++i) {
        out += format_double(profile.r_grid[i]);
        out += ',';
        out += format_double(profile.h_values[i]);
        out += '\n';
    }
    return out;
}

} // namespace needlebench
