#pragma once

#include <Eigen/Dense>
#include <vector>

#include "needlebench/errors.hpp"

namespace needlebench {

enum class KernelFamily { SquaredExponential, Matern };

// Stationary, correlation-normalized kernel: k(x, x) = 1 for both families.
struct KernelSpec {
    KernelFamily family = KernelFamily::SquaredExponential;
    double l = 1.0;  // lengthscale, > 0
    double nu = 1.5; // Matern smoothness, > 0 (ignored for SE)
    int d = 1;       // ambient dimension, >= 1

    void validate() const;
};

using Point = Eigen::VectorXd;

// k(x, x') as a function of r = ||x - x'||.
double eval_kernel_radial(const KernelSpec& spec, double r);
double eval_kernel(const KernelSpec& spec, const Point& x, const Point& y);

// Spectral density K(xi) in the unitary convention F(xi) = \int f(x) e^{-2 pi i x.xi} dx,
// so that \int K(xi) dxi = k(0) = 1.
//   SE:     K(xi) = (2 pi l^2)^{d/2} exp(-2 pi^2 l^2 ||xi||^2)
//   Matern: K(xi) = c1 (2 nu / l^2 + 4 pi^2 ||xi||^2)^{-(nu + d/2)}
double spectral_density_radial(const KernelSpec& spec, double rho);
double spectral_density(const KernelSpec& spec, const Point& xi);

// Prefactor c1 = 2^d pi^{d/2} Gamma(nu + d/2) (2 nu)^nu / (Gamma(nu) l^{2 nu}).
double matern_spectral_prefactor(const KernelSpec& spec);

// Gram matrix over a point set; unit diagonal, symmetric, numerically PSD.
Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const std::vector<Point>& points);

// \int K(xi) dxi over R^d by radial quadrature; equals 1 up to quadrature error.
double spectral_mass(const KernelSpec& spec, double rel_tol = 1e-9);

} // namespace needlebench
