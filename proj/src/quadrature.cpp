#include "needlebench/quadrature.hpp"

#include <cmath>

namespace needlebench {

namespace {

// Nodes/weights on [-1, 1] by Newton iteration on the Legendre recurrence.
QuadRule make_rule(int n) {
    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        // map [-1,1] -> [0,1]
        rule.nodes[i] = 0.5 * (1.0 - x);
        rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
        rule.weights[i] = 0.5 * w;
        rule.weights[n - 1 - i] = 0.5 * w;
    }
    return rule;
}

} // namespace

const QuadRule& gauss_legendre(int n) {
    static std::mutex mtx;
    static std::map<int, QuadRule> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_rule(n)).first;
    return it->second;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b, int n) {
    const QuadRule& rule = gauss_legendre(n);
    const double len = b - a;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += rule.weights[i] * f(a + len * rule.nodes[i]);
    return sum * len;
}

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double rel_tol, double abs_tol, int n_start, int n_max) {
    double prev = integrate_gl(f, a, b, n_start);
    for (int n = 2 * n_start; n <= n_max; n *= 2) {
        const double cur = integrate_gl(f, a, b, n);
        const double delta = std::abs(cur - prev);
        if (delta <= abs_tol || delta <= rel_tol * std::abs(cur)) {
            return {cur, delta, n};
        }
        prev = cur;
    }
    throw AccuracyError("quadrature did not converge after node doubling up to n_max");
}

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                    double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0) throw AccuracyError("adaptive Simpson recursion depth exceeded");
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

double integrate_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                         int max_depth) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

double unit_sphere_area(int d) {
    return 2.0 * std::pow(3.14159265358979323846, 0.5 * d) / std::tgamma(0.5 * d);
}

double ball_volume(int d, double r) {
    return std::pow(3.14159265358979323846, 0.5 * d) * std::pow(r, d) /
           std::tgamma(0.5 * d + 1.0);
}

} // namespace needlebench
