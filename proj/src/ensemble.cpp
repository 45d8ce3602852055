#include "needlebench/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>

namespace needlebench {

namespace {
constexpr double kPi = 3.14159265358979323846;

void check_point(const NeedleEnsemble& ens, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != ens.spec.d)
        throw ParameterError("point dimension does not match ensemble");
    for (double v : x) {
        if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error("point outside [0,1]^d");
    }
}

// Distance from the needle center to the axis-aligned cell of region j,
// clipped to the domain.
double center_to_cell_distance(const NeedleEnsemble& ens, long long m, long long j) {
    const std::vector<double> c = ens.center(m);
    long long q = j - 1;
    double sq = 0.0;
    for (int k = ens.spec.d - 1; k >= 0; --k) {
        const long long idx = q % ens.per_dim;
        q /= ens.per_dim;
        const double lo = idx * ens.w;
        const double hi = std::min((idx + 1) * ens.w, 1.0);
        const double g = std::max({lo - c[k], c[k] - hi, 0.0});
        sq += g * g;
    }
    return std::sqrt(sq);
}

} // namespace

long long member_count_for_step(double w, int d) {
    if (!(w > 0.0)) throw ParameterError("grid step must be positive");
    const long long per_dim = static_cast<long long>(std::floor(1.0 / w));
    long long m = 1;
    for (int k = 0; k < d; ++k) m *= per_dim;
    return m;
}

double se_width(const KernelSpec& spec, double epsilon, double B, double h0) {
    const double arg = B * std::pow(2.0 * kPi * spec.l * spec.l, 0.25 * spec.d) * h0 /
                       (2.0 * epsilon);
    if (!(arg > 1.0))
        throw ConstructionError(
            "epsilon too large: B (2 pi l^2)^{d/4} h(0) must exceed 2 epsilon for the SE width");
    return kPi * spec.l / std::sqrt(std::log(arg));
}

double matern_volume_constant(const KernelSpec& spec) {
    // c2 = c1^{-1} pi^{d/2} / Gamma(d/2 + 1): the exact prefactor with the
    // standard ball volume, so the norm chain stays a true upper bound.
    return std::pow(kPi, 0.5 * spec.d) /
           (matern_spectral_prefactor(spec) * std::tgamma(0.5 * spec.d + 1.0));
}

double matern_width(const KernelSpec& spec, double epsilon, double B, double h0) {
    const double c2 = matern_volume_constant(spec);
    const double num = 2.0 * epsilon * std::pow(8.0 * kPi * kPi, 0.5 * (spec.nu + 0.5 * spec.d));
    const double den = B * h0 / std::sqrt(c2);
    return std::pow(num / den, 1.0 / spec.nu);
}

EnsembleGeometry ensemble_geometry(const KernelSpec& spec, double epsilon, double B,
                                   const BumpProfile& profile,
                                   std::optional<double> w0_override) {
    spec.validate();
    if (!(epsilon > 0.0)) throw ParameterError("epsilon must be positive");
    if (!(B > 0.0)) throw ParameterError("RKHS budget B must be positive");
    if (profile.d != spec.d) throw ParameterError("profile dimension does not match kernel spec");

    EnsembleGeometry g;
    if (w0_override) {
        if (!(*w0_override > 0.0)) throw ParameterError("w0 override must be positive");
        g.w0 = *w0_override;
    } else if (spec.family == KernelFamily::SquaredExponential) {
        g.w0 = se_width(spec, epsilon, B, profile.h0);
    } else {
        g.w0 = matern_width(spec, epsilon, B, profile.h0);
    }

    if (spec.family == KernelFamily::SquaredExponential) {
        const double side = std::pow(g.w0, spec.d) * std::pow(kPi, 0.5 * spec.d) /
                            std::tgamma(0.5 * spec.d + 1.0);
        if (side > 1.0)
            g.violations.push_back("SE side condition w0^{2d} V(1/w0) <= 1 violated (" +
                                   std::to_string(side) + " > 1); epsilon/B too large");
    } else {
        const double side = 2.0 * spec.nu * g.w0 * g.w0 / (spec.l * spec.l);
        if (side > 4.0 * kPi * kPi)
            g.violations.push_back("Matern side condition 2 nu w0^2 / l^2 <= 4 pi^2 violated (" +
                                   std::to_string(side) + "); epsilon/B too large");
    }

    // Grid step twice the certified outer half-radius: the epsilon-optimal
    // set of a needle is then strictly confined to its own cell, so the
    // separation property holds exactly rather than only asymptotically.
    g.w = 2.0 * profile.zeta_outer * g.w0;
    long long per_dim = static_cast<long long>(std::floor(1.0 / g.w));
    if (per_dim < 1) {
        g.degenerate = true;
        per_dim = 1;
    }
    g.per_dim = static_cast<int>(per_dim);
    g.M = 1;
    for (int k = 0; k < spec.d; ++k) g.M *= per_dim;
    if (g.M < 2)
        g.violations.push_back("member count M = " + std::to_string(g.M) +
                               " < 2; epsilon/B too large for a multi-needle grid");
    return g;
}

NeedleEnsemble build_ensemble(const KernelSpec& spec, double epsilon, double B,
                              std::shared_ptr<const BumpProfile> profile,
                              const BuildOptions& opts) {
    if (!profile) throw ParameterError("null profile");
    EnsembleGeometry g = ensemble_geometry(spec, epsilon, B, *profile, opts.w0_override);
    if (opts.strict && !g.violations.empty()) throw ConstructionError(g.violations.front());

    NeedleEnsemble ens;
    ens.spec = spec;
    ens.epsilon = epsilon;
    ens.B = B;
    ens.profile = std::move(profile);
    ens.w0 = g.w0;
    ens.w = g.w;
    ens.per_dim = g.per_dim;
    ens.M = g.M;
    ens.a0 = 2.0 * epsilon / ens.profile->h0;
    ens.degenerate = g.degenerate;
    ens.relaxed_violations = std::move(g.violations);
    return ens;
}

std::vector<double> NeedleEnsemble::center(long long m) const {
    if (m < 1 || m > M) throw ParameterError("member index out of range");
    std::vector<double> c(spec.d);
    if (degenerate) {
        std::fill(c.begin(), c.end(), 0.5);
        return c;
    }
    long long q = m - 1;
    for (int k = spec.d - 1; k >= 0; --k) {
        c[k] = (q % per_dim + 0.5) * w;
        q /= per_dim;
    }
    return c;
}

std::vector<std::vector<double>> NeedleEnsemble::centers() const {
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<std::size_t>(M));
    for (long long m = 1; m <= M; ++m) out.push_back(center(m));
    return out;
}

double eval_needle(const NeedleEnsemble& ens, long long m, const std::vector<double>& x) {
    check_point(ens, x);
    if (m < 0 || m > ens.M) throw ParameterError("member index out of range");
    if (m == 0) return 0.0;
    const std::vector<double> c = ens.center(m);
    double sq = 0.0;
    for (int k = 0; k < ens.spec.d; ++k) sq += (x[k] - c[k]) * (x[k] - c[k]);
    return ens.a0 * ens.profile->eval(std::sqrt(sq) / ens.w0);
}

long long region_index(const NeedleEnsemble& ens, const std::vector<double>& x) {
    check_point(ens, x);
    long long j = 0;
    for (int k = 0; k < ens.spec.d; ++k) {
        const double q = x[k] / ens.w;
        double f = std::floor(q);
        if (f > 0.0 && q == f) f -= 1.0; // shared boundaries belong to the lower cell
        const long long idx = std::min<long long>(std::max<long long>(0, static_cast<long long>(f)),
                                                  ens.per_dim - 1);
        j = j * ens.per_dim + idx;
    }
    return j + 1;
}

double vbar(const NeedleEnsemble& ens, long long m, long long j) {
    if (m < 0 || m > ens.M || j < 1 || j > ens.M) throw ParameterError("index out of range");
    if (m == 0) return 0.0;
    const double eps = ens.epsilon;
    const double r_min = center_to_cell_distance(ens, m, j) / ens.w0;
    const double envelope = ens.a0 * ens.profile->tail_sup(r_min);
    const double padded = envelope + 1e-4 * eps;
    return std::min(2.0 * eps, std::max(-2.0 * eps, padded));
}

double vbar_subgrid_scan(const NeedleEnsemble& ens, long long m, long long j,
                         int points_per_dim) {
    if (m < 0 || m > ens.M || j < 1 || j > ens.M) throw ParameterError("index out of range");
    if (m == 0) return 0.0;
    const int d = ens.spec.d;
    std::vector<double> lo(d), hi(d);
    long long q = j - 1;
    for (int k = d - 1; k >= 0; --k) {
        const long long idx = q % ens.per_dim;
        q /= ens.per_dim;
        lo[k] = idx * ens.w;
        hi[k] = std::min((idx + 1) * ens.w, 1.0);
    }
    long long total = 1;
    for (int k = 0; k < d; ++k) total *= points_per_dim;
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> x(d);
    for (long long t = 0; t < total; ++t) {
        long long r = t;
        for (int k = d - 1; k >= 0; --k) {
            const int i = static_cast<int>(r % points_per_dim);
            r /= points_per_dim;
            x[k] = lo[k] + (hi[k] - lo[k]) * i / (points_per_dim - 1.0);
        }
        best = std::max(best, eval_needle(ens, m, x));
    }
    return best;
}

VbarSums vbar_sums_report(const NeedleEnsemble& ens) {
    VbarSums out;
    const double eps = ens.epsilon;
    std::vector<double> col_sum(static_cast<std::size_t>(ens.M), 0.0);
    std::vector<double> col_sq(static_cast<std::size_t>(ens.M), 0.0);
    for (long long m = 1; m <= ens.M; ++m) {
        double row = 0.0;
        for (long long j = 1; j <= ens.M; ++j) {
            const double v = vbar(ens, m, j);
            row += v;
            col_sum[static_cast<std::size_t>(j - 1)] += v;
            col_sq[static_cast<std::size_t>(j - 1)] += v * v;
        }
        out.max_over_m_sum_j = std::max(out.max_over_m_sum_j, row / eps);
    }
    for (long long j = 0; j < ens.M; ++j) {
        out.max_over_j_sum_m = std::max(out.max_over_j_sum_m, col_sum[j] / eps);
        out.max_over_j_sum_m_sq = std::max(out.max_over_j_sum_m_sq, col_sq[j] / (eps * eps));
    }
    return out;
}

std::string ensemble_to_json(const NeedleEnsemble& ens, int indent) {
    nlohmann::json j;
    j["family"] = ens.spec.family == KernelFamily::SquaredExponential ? "se" : "matern";
    j["d"] = ens.spec.d;
    j["l"] = ens.spec.l;
    j["nu"] = ens.spec.family == KernelFamily::Matern ? nlohmann::json(ens.spec.nu)
                                                      : nlohmann::json(nullptr);
    j["epsilon"] = ens.epsilon;
    j["B"] = ens.B;
    j["w0"] = ens.w0;
    j["w"] = ens.w;
    j["M"] = ens.M;
    j["zeta"] = ens.profile->zeta;
    j["h0"] = ens.profile->h0;
    j["centers"] = ens.centers();
    if (!ens.relaxed_violations.empty()) j["relaxed_violations"] = ens.relaxed_violations;
    return j.dump(indent);
}

} // namespace needlebench
