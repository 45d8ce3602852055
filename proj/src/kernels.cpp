#include "needlebench/kernels.hpp"

#include <cmath>

#include "needlebench/quadrature.hpp"

namespace needlebench {

namespace {
constexpr double kPi = 3.14159265358979323846;

bool is_half_integer_order(double nu, int& n_out) {
    const double two_nu = 2.0 * nu;
    const double rounded = std::round(two_nu);
    if (std::abs(two_nu - rounded) > 1e-12) return false;
    const long long r = static_cast<long long>(rounded);
    if (r % 2 == 0 || r < 1) return false;
    n_out = static_cast<int>((r - 1) / 2);
    return true;
}

// k(z) = exp(-z) (n! / (2n)!) sum_{k=0}^{n} ((n+k)! / (k! (n-k)!)) (2z)^{n-k}
// for nu = n + 1/2; exact closed form of the half-integer Matern correlation.
double matern_half_integer(int n, double z) {
    double lead = 1.0; // n! / (2n)!
    for (int j = n + 1; j <= 2 * n; ++j) lead /= j;
    double sum = 0.0;
    for (int k = 0; k <= n; ++k) {
        // (n+k)! / (k! (n-k)!)
        double c = 1.0;
        for (int j = 1; j <= n + k; ++j) c *= j;
        for (int j = 1; j <= k; ++j) c /= j;
        for (int j = 1; j <= n - k; ++j) c /= j;
        sum += c * std::pow(2.0 * z, n - k);
    }
    return std::exp(-z) * lead * sum;
}

} // namespace

void KernelSpec::validate() const {
    if (!(l > 0.0)) throw ParameterError("kernel lengthscale l must be positive");
    if (family == KernelFamily::Matern && !(nu > 0.0))
        throw ParameterError("Matern smoothness nu must be positive");
    if (d < 1) throw ParameterError("dimension d must be at least 1");
}

double eval_kernel_radial(const KernelSpec& spec, double r) {
    spec.validate();
    if (!(r >= 0.0) || !std::isfinite(r)) throw ParameterError("distance must be finite and nonnegative");
    if (spec.family == KernelFamily::SquaredExponential) {
        return std::exp(-r * r / (2.0 * spec.l * spec.l));
    }
    if (r == 0.0) return 1.0; // removable singularity of z^nu K_nu(z)
    const double z = std::sqrt(2.0 * spec.nu) * r / spec.l;
    if (z < 1e-8) return 1.0;
    int n = 0;
    if (is_half_integer_order(spec.nu, n)) return matern_half_integer(n, z);
    if (z > 705.0) return 0.0; // exp(-z) underflows
    const double val = std::pow(2.0, 1.0 - spec.nu) / std::tgamma(spec.nu) *
                       std::pow(z, spec.nu) * std::cyl_bessel_k(spec.nu, z);
    return std::min(val, 1.0);
}

double eval_kernel(const KernelSpec& spec, const Point& x, const Point& y) {
    spec.validate();
    if (x.size() != spec.d || y.size() != spec.d)
        throw ParameterError("point dimension does not match kernel spec");
    if (!x.allFinite() || !y.allFinite()) throw ParameterError("points must have finite coordinates");
    return eval_kernel_radial(spec, (x - y).norm());
}

double matern_spectral_prefactor(const KernelSpec& spec) {
    const double log_c1 = spec.d * std::log(2.0) + 0.5 * spec.d * std::log(kPi) +
                          std::lgamma(spec.nu + 0.5 * spec.d) + spec.nu * std::log(2.0 * spec.nu) -
                          std::lgamma(spec.nu) - 2.0 * spec.nu * std::log(spec.l);
    return std::exp(log_c1);
}

double spectral_density_radial(const KernelSpec& spec, double rho) {
    spec.validate();
    if (!(rho >= 0.0) || !std::isfinite(rho))
        throw ParameterError("frequency radius must be finite and nonnegative");
    if (spec.family == KernelFamily::SquaredExponential) {
        return std::pow(2.0 * kPi * spec.l * spec.l, 0.5 * spec.d) *
               std::exp(-2.0 * kPi * kPi * spec.l * spec.l * rho * rho);
    }
    const double base = 2.0 * spec.nu / (spec.l * spec.l) + 4.0 * kPi * kPi * rho * rho;
    return matern_spectral_prefactor(spec) * std::pow(base, -(spec.nu + 0.5 * spec.d));
}

double spectral_density(const KernelSpec& spec, const Point& xi) {
    if (xi.size() != spec.d) throw ParameterError("frequency dimension does not match kernel spec");
    if (!xi.allFinite()) throw ParameterError("frequency must have finite coordinates");
    return spectral_density_radial(spec, xi.norm());
}

Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const std::vector<Point>& points) {
    spec.validate();
    if (points.empty()) throw ParameterError("kernel_matrix requires at least one point");
    const int n = static_cast<int>(points.size());
    Eigen::MatrixXd K(n, n);
    for (int i = 0; i < n; ++i) {
        K(i, i) = 1.0;
        for (int j = i + 1; j < n; ++j) {
            const double v = eval_kernel(spec, points[i], points[j]);
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    return K;
}

double spectral_mass(const KernelSpec& spec, double rel_tol) {
    spec.validate();
    const double surface = unit_sphere_area(spec.d);
    if (spec.family == KernelFamily::SquaredExponential) {
        // Gaussian tail: 10 standard deviations of the frequency profile.
        const double r_cut = 10.0 / (2.0 * kPi * spec.l);
        auto f = [&](double rho) {
            return spectral_density_radial(spec, rho) * std::pow(rho, spec.d - 1);
        };
        return surface * integrate_adaptive(f, 0.0, r_cut, rel_tol).value;
    }
    // Heavy polynomial tail: map [0, inf) -> [0, 1) with rho = t / (1 - t).
    auto f = [&](double t) {
        const double om = 1.0 - t;
        const double rho = t / om;
        return spectral_density_radial(spec, rho) * std::pow(rho, spec.d - 1) / (om * om);
    };
    return surface * integrate_adaptive(f, 0.0, 1.0, rel_tol).value;
}

} // namespace needlebench
