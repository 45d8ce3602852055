#pragma once

#include <string>
#include <vector>

#include "needlebench/errors.hpp"

namespace needlebench {

// Frequency-domain bump window: exp(-1 / (1 - s)) on s = ||xi||^2 < 1, else 0.
double bump_value_squared_radius(double s);
double bump_value_radial(double rho);
double bump_value(const std::vector<double>& xi);

// Tabulated radial profile of h, the d-dimensional inverse Fourier transform
// of the bump window, with the derived constants h(0) and the half-width zeta
// (smallest tabulated radius beyond which h stays strictly below h(0)/2).
struct BumpProfile {
    int d = 1;
    std::vector<double> r_grid;   // strictly increasing, r_grid[0] = 0
    std::vector<double> h_values; // h(r) on r_grid
    double h0 = 0.0;
    double zeta = 0.0;       // last tabulated radius with h >= h0/2
    double zeta_outer = 0.0; // first tabulated radius past which h < h0/2 holds continuously
    int quadrature_nodes = 0;
    double r_max = 0.0;

    // Monotone cubic (pchip) slopes and a right-to-left running maximum of h,
    // both derived from the table at construction.
    std::vector<double> slopes;
    std::vector<double> suffix_max;
    double second_derivative_bound = 0.0; // certified sup |h''|

    // Interpolated h(r); zero beyond r_max (tail certified below 1e-6 h0).
    double eval(double r) const;

    // Upper bound on sup_{r' >= r} h(r'), from the tabulated running maximum.
    double tail_sup(double r) const;
};

struct ProfileOptions {
    double r_max = 32.0;
    int n_r = 8192;
    int n_quad = 64;         // starting node count; doubled until stable
    double sup_tol = 1e-8;   // sup-norm agreement between doublings
    int max_doublings = 8;
};

BumpProfile inverse_transform_profile(int d, const ProfileOptions& opts = {});

// Smallest tabulated zeta with h(r) < h0/2 for every tabulated r > zeta.
// Throws std::domain_error when the profile has not decayed below h0/2.
double half_width(const BumpProfile& profile);

// CSV with columns r,h in shortest round-trip decimal form.
std::string profile_to_csv(const BumpProfile& profile);

} // namespace needlebench
