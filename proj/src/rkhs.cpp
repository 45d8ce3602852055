#include "needlebench/rkhs.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "needlebench/quadrature.hpp"

namespace needlebench {

namespace {
constexpr double kPi = 3.14159265358979323846;
} // namespace

SpectralNorm rkhs_norm_spectral(const KernelSpec& spec,
                                const std::function<double(double)>& G_radial, double R,
                                double rel_tol, int n_start) {
    spec.validate();
    if (!(R > 0.0)) throw ParameterError("support radius R must be positive");
    const double surface = unit_sphere_area(spec.d);
    auto integrand = [&](double rho) {
        const double g = G_radial(rho);
        return g * g / spectral_density_radial(spec, rho) * std::pow(rho, spec.d - 1);
    };
    const QuadResult q = integrate_adaptive(integrand, 0.0, R, rel_tol, 1e-300, n_start);
    SpectralNorm out;
    out.value = std::sqrt(surface * q.value);
    out.nodes = q.nodes;
    // Richardson-style slack: ten times the last doubling delta, mapped through
    // the square root.
    const double energy = surface * q.value;
    const double energy_err = 10.0 * surface * q.last_delta;
    out.error_estimate =
        energy > 0.0 ? std::sqrt(energy + energy_err) - std::sqrt(energy) : std::sqrt(energy_err);
    return out;
}

NormCertificate compute_certificate(const NeedleEnsemble& ens) {
    const KernelSpec& spec = ens.spec;
    const double a0 = ens.a0, w0 = ens.w0;
    const int d = spec.d;
    const double scale = a0 * std::pow(w0, d);
    auto G = [&](double rho) { return scale * bump_value_radial(w0 * rho); };
    const double R = 1.0 / w0;

    NormCertificate cert;
    cert.budget = ens.B;
    const SpectralNorm norm = rkhs_norm_spectral(spec, G, R);
    cert.norm_numeric = norm.value;
    cert.quadrature_error_estimate = norm.error_estimate;
    cert.margin = ens.B - norm.value;

    const double surface = unit_sphere_area(d);
    cert.chain.push_back({"exact spectral integral", norm.value * norm.value});

    if (spec.family == KernelFamily::SquaredExponential) {
        const double pref = a0 * a0 * std::pow(w0, 2 * d) /
                            std::pow(2.0 * kPi * spec.l * spec.l, 0.5 * d);
        const double grow = integrate_adaptive(
                                [&](double rho) {
                                    return std::exp(2.0 * kPi * kPi * spec.l * spec.l * rho * rho) *
                                           std::pow(rho, d - 1);
                                },
                                0.0, R, 1e-10)
                                .value;
        cert.chain.push_back({"bump factor dropped", pref * surface * grow});
        const double vol = ball_volume(d, R);
        const double peak = std::exp(2.0 * kPi * kPi * spec.l * spec.l / (w0 * w0));
        cert.chain.push_back({"integrand frozen at the support edge", pref * vol * peak});
        cert.chain.push_back({"volume factor dropped",
                              a0 * a0 / std::pow(2.0 * kPi * spec.l * spec.l, 0.5 * d) * peak});
        const double side = std::pow(w0, d) * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
        if (side > 1.0) {
            cert.side_conditions_ok = false;
            cert.side_condition_notes.push_back(
                "w0^{2d} V(1/w0) > 1: final chain step is not a majorant of its predecessor");
        }
    } else {
        const double c1 = matern_spectral_prefactor(spec);
        const double c2 = matern_volume_constant(spec);
        const double expo = spec.nu + 0.5 * d;
        const double pref = a0 * a0 * std::pow(w0, 2 * d) / c1;
        const double grow = integrate_adaptive(
                                [&](double rho) {
                                    const double base = 2.0 * spec.nu / (spec.l * spec.l) +
                                                        4.0 * kPi * kPi * rho * rho;
                                    return std::pow(base, expo) * std::pow(rho, d - 1);
                                },
                                0.0, R, 1e-10)
                                .value;
        cert.chain.push_back({"bump factor dropped", pref * surface * grow});
        const double edge = 2.0 * spec.nu / (spec.l * spec.l) + 4.0 * kPi * kPi / (w0 * w0);
        cert.chain.push_back(
            {"integrand frozen at the support edge", pref * ball_volume(d, R) * std::pow(edge, expo)});
        const double rescaled = c2 * a0 * a0 * std::pow(w0, -2.0 * spec.nu) *
                                std::pow(2.0 * spec.nu * w0 * w0 / (spec.l * spec.l) +
                                             4.0 * kPi * kPi,
                                         expo);
        cert.chain.push_back({"volume prefactor absorbed into c2", rescaled});
        const double final_bound = c2 * a0 * a0 * std::pow(w0, -2.0 * spec.nu) *
                                   std::pow(8.0 * kPi * kPi, expo);
        cert.chain.push_back({"frequency term frozen at 8 pi^2", final_bound});
        const double side = 2.0 * spec.nu * w0 * w0 / (spec.l * spec.l);
        if (side > 4.0 * kPi * kPi) {
            cert.side_conditions_ok = false;
            cert.side_condition_notes.push_back(
                "2 nu w0^2 / l^2 > 4 pi^2: final chain step is not a majorant of its predecessor");
        }
    }

    cert.norm_chain_bound = std::sqrt(cert.chain.back().value);
    return cert;
}

NormCertificate certify_ensemble_norm(const NeedleEnsemble& ens) {
    NormCertificate cert = compute_certificate(ens);
    if (!certificate_ok(cert))
        throw CertificationError("needle norm exceeds the budget beyond quadrature error");
    return cert;
}

std::string certificate_to_json(const NormCertificate& cert, int indent) {
    nlohmann::json j;
    j["norm_numeric"] = cert.norm_numeric;
    j["norm_chain_bound"] = cert.norm_chain_bound;
    j["budget"] = cert.budget;
    j["margin"] = cert.margin;
    j["quadrature_error_estimate"] = cert.quadrature_error_estimate;
    j["side_conditions_ok"] = cert.side_conditions_ok;
    j["side_condition_notes"] = cert.side_condition_notes;
    nlohmann::json chain = nlohmann::json::array();
    for (const ChainStep& s : cert.chain) chain.push_back({{"step", s.label}, {"value", s.value}});
    j["chain"] = chain;
    return j.dump(indent);
}

} // namespace needlebench
