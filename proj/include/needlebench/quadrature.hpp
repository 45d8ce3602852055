#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "needlebench/errors.hpp"

namespace needlebench {

struct QuadRule {
    std::vector<double> nodes;   // on [0, 1]
    std::vector<double> weights; // sum to 1
};

// Gauss-Legendre rule mapped to [0, 1].  Rules are cached per node count.
const QuadRule& gauss_legendre(int n);

struct QuadResult {
    double value = 0.0;
    double last_delta = 0.0; // |change| on the final node doubling
    int nodes = 0;
};

// Integrate f over [a, b] with Gauss-Legendre, doubling the node count until
// successive values agree to the tolerance.  Throws AccuracyError when the
// cap is reached without convergence.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double rel_tol = 1e-10, double abs_tol = 1e-14,
                              int n_start = 64, int n_max = 1 << 17);

// Fixed-rule Gauss-Legendre integral over [a, b].
double integrate_gl(const std::function<double(double)>& f, double a, double b, int n);

// Adaptive Simpson; independent of the Gauss-Legendre path, used as a
// quadrature oracle in tests and for the KL cross-checks.
double integrate_simpson(const std::function<double(double)>& f, double a, double b,
                         double tol = 1e-12, int max_depth = 48);

// Surface area of the unit sphere in d dimensions, 2 pi^{d/2} / Gamma(d/2).
double unit_sphere_area(int d);

// Volume of a d-ball of radius r, pi^{d/2} r^d / Gamma(d/2 + 1).
double ball_volume(int d, double r);

} // namespace needlebench
