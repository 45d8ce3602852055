#include "needlebench/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>

#include "needlebench/csv.hpp"
#include "needlebench/errors.hpp"

namespace needlebench {

double gaussian_kl(double mu1, double mu2, double sigma) {
    if (!(sigma > 0.0)) throw ParameterError("sigma must be positive");
    const double diff = mu1 - mu2;
    return diff * diff / (2.0 * sigma * sigma);
}

double auer_gap(double e0, double A, double div) {
    if (!(A > 0.0)) throw ParameterError("range bound A must be positive");
    if (!(div >= 0.0)) throw ParameterError("divergence must be nonnegative");
    return e0 + A * std::sqrt(div);
}

double simple_regret_threshold_for_count(long long M, double epsilon, double sigma, double C) {
    if (!(C > 0.0)) throw ParameterError("calibration constant C must be positive");
    if (!(epsilon > 0.0)) throw ParameterError("epsilon must be positive");
    if (!(sigma > 0.0)) throw ParameterError("sigma must be positive");
    return static_cast<double>(M) * sigma * sigma / (4.0 * C * C * epsilon * epsilon);
}

double simple_regret_threshold(const KernelSpec& spec, const BumpProfile& profile, double epsilon,
                               double B, double sigma, double C) {
    const EnsembleGeometry g = ensemble_geometry(spec, epsilon, B, profile);
    return simple_regret_threshold_for_count(g.M, epsilon, sigma, C);
}

namespace {

long long member_count_at(const KernelSpec& spec, const BumpProfile& profile, double epsilon,
                          double B) {
    return ensemble_geometry(spec, epsilon, B, profile).M;
}

// Largest epsilon the SE width formula accepts (log argument > 1).
double epsilon_ceiling(const KernelSpec& spec, const BumpProfile& profile, double B) {
    if (spec.family != KernelFamily::SquaredExponential)
        return std::numeric_limits<double>::infinity();
    return 0.5 * B * std::pow(2.0 * 3.14159265358979323846 * spec.l * spec.l, 0.25 * spec.d) *
           profile.h0 * (1.0 - 1e-9);
}

} // namespace

CumulativeLower cumulative_regret_lower(const KernelSpec& spec, const BumpProfile& profile,
                                        double T, double B, double sigma, double C_prime) {
    if (!(T >= 1.0)) throw ParameterError("horizon T must be at least 1");
    if (!(C_prime > 0.0)) throw ParameterError("calibration constant must be positive");
    if (!(sigma > 0.0) || !(B > 0.0)) throw ParameterError("sigma and B must be positive");
    // Mild technical side condition, sigma / B = O(sqrt(T)) with a small constant.
    if (sigma / B > 0.1 * std::sqrt(T))
        throw std::domain_error("side condition sigma/B <= 0.1 sqrt(T) violated");

    const double c8 = sigma * sigma / (8.0 * C_prime * C_prime * T);
    auto g = [&](double eps) {
        return std::sqrt(static_cast<double>(member_count_at(spec, profile, eps, B)) * c8);
    };

    CumulativeLower out;
    const double eps_cap = epsilon_ceiling(spec, profile, B);

    // g is non-increasing while the identity is increasing, so bracket and
    // bisect the (possibly jump-crossing) root of g(eps) - eps.
    double lo = std::min(1e-12, 0.5 * eps_cap);
    if (!(g(lo) > lo)) throw NumericError("no bracket: g(eps) <= eps at the lower end");
    double hi = std::min(2.0 * std::sqrt(c8), 0.999 * eps_cap);
    int guard = 0;
    while (g(hi) > hi) {
        hi = std::min(2.0 * hi, 0.999 * eps_cap);
        if (++guard > 200 || hi >= 0.999 * eps_cap * (1.0 - 1e-12))
            throw NumericError("failed to bracket the cumulative-regret fixed point");
    }
    int iters = 0;
    for (; iters < 1000 && (hi - lo) > 1e-15 * hi; ++iters) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) > mid)
            lo = mid;
        else
            hi = mid;
    }
    out.iterations = iters;

    // Generic case: the member count is locally constant at the root, so one
    // more application of g lands exactly on the fixed point.  Among the
    // admissible candidates (between the 8- and 4-denominator forms), prefer
    // the one closest to equality in the defining relation.
    double best = -1.0, best_residual = std::numeric_limits<double>::infinity();
    for (double cand : {g(hi), hi, std::sqrt(2.0) * g(hi)}) {
        if (!(cand > 0.0) || cand >= eps_cap) continue;
        const double gc = g(cand);
        const bool admissible =
            gc <= cand * (1.0 + 1e-12) && cand <= std::sqrt(2.0) * gc * (1.0 + 1e-12);
        if (!admissible) continue;
        const double residual = std::abs(cand - gc) / cand;
        if (residual < best_residual - 1e-15 ||
            (std::abs(residual - best_residual) <= 1e-15 && cand > best)) {
            best = cand;
            best_residual = residual;
        }
    }
    if (best < 0.0)
        throw NumericError("no admissible epsilon between the 8- and 4-denominator forms");
    out.eps_star = best;
    out.M = member_count_at(spec, profile, best, B);
    out.residual = std::abs(best - g(best)) / best;
    out.R_lower = T * best;
    return out;
}

double high_prob_conversion(double eta) {
    if (!(eta > 0.0 && eta <= 1.0)) throw ParameterError("eta must lie in (0, 1]");
    return (1.0 - eta) / (4.0 - eta);
}

std::vector<std::pair<int, double>> info_gain_greedy_from_cov(const Eigen::MatrixXd& K, int T,
                                                              double sigma) {
    if (!(sigma > 0.0)) throw ParameterError("sigma must be positive");
    if (T < 0) throw ParameterError("horizon must be nonnegative");
    const double s2 = sigma * sigma;
    Eigen::MatrixXd P = K;
    std::vector<std::pair<int, double>> curve;
    curve.reserve(T);
    double gamma = 0.0;
    for (int t = 1; t <= T; ++t) {
        long long best = 0;
        for (long long i = 1; i < P.rows(); ++i)
            if (P(i, i) > P(best, best)) best = i;
        const double var = std::max(P(best, best), 0.0);
        gamma += 0.5 * std::log1p(var / s2);
        curve.emplace_back(t, gamma);
        const double denom = var + s2;
        const Eigen::VectorXd col = P.col(best);
        P.noalias() -= (col / denom) * col.transpose();
    }
    return curve;
}

std::vector<std::pair<int, double>> info_gain_greedy(const KernelSpec& spec,
                                                     const std::vector<Point>& candidates, int T,
                                                     double sigma) {
    if (candidates.empty()) throw ParameterError("candidate set must be nonempty");
    return info_gain_greedy_from_cov(kernel_matrix(spec, candidates), T, sigma);
}

double upper_bound_sri(double gamma, double B, double T) {
    if (!(gamma >= 0.0)) throw ParameterError("gamma must be nonnegative");
    return std::sqrt(T * B * gamma + T * gamma * gamma);
}

double calibrate_constant(const NeedleEnsemble& ens) {
    const VbarSums sums = vbar_sums_report(ens);
    const double c_first = sums.max_over_j_sum_m;
    const double c_second =
        sums.max_over_m_sum_j * std::sqrt(sums.max_over_j_sum_m_sq) / std::sqrt(2.0);
    return std::max(c_first, c_second);
}

namespace {

std::string omega(const std::string& inner) { return "Omega(" + inner + ")"; }
std::string ostar(const std::string& inner) { return "O*(" + inner + ")"; }

std::string se_cumulative_form(double log_power) {
    return "sqrt(T (log T)^" + format_double(log_power) + ")";
}
std::string se_simple_form(double log_power) {
    return "(1/eps)^2 (log(1/eps))^" + format_double(log_power) + "";
}
std::string matern_cumulative_form(double t_power) {
    return "T^" + format_double(t_power);
}
std::string matern_simple_form(double eps_power) {
    return "(1/eps)^" + format_double(eps_power);
}

} // namespace

ExponentTable exponent_table(const KernelSpec& spec) {
    spec.validate();
    ExponentTable tab;
    tab.spec = spec;
    const double d = spec.d;
    if (spec.family == KernelFamily::SquaredExponential) {
        tab.cumulative_lower = {0.5, d / 4.0, true, omega(se_cumulative_form(d / 2.0))};
        tab.cumulative_sri = {0.5, d, true, ostar(se_cumulative_form(2.0 * d))};
        tab.cumulative_conjectured = {0.5, d / 2.0, true, ostar(se_cumulative_form(d))};
        tab.simple_lower = {2.0, d / 2.0, true, omega(se_simple_form(d / 2.0))};
        tab.simple_sri = {2.0, 2.0 * d, true, ostar(se_simple_form(2.0 * d))};
        tab.simple_conjectured = {2.0, d, true, ostar(se_simple_form(d))};
    } else {
        const double nu = spec.nu;
        const double dd1 = d * (d + 1.0);
        tab.cumulative_lower = {(nu + d) / (2.0 * nu + d), 0.0, true,
                                omega(matern_cumulative_form((nu + d) / (2.0 * nu + d)))};
        tab.cumulative_sri = {0.5 * (2.0 * nu + 3.0 * dd1) / (2.0 * nu + dd1), 0.0,
                              2.0 * nu > dd1,
                              ostar(matern_cumulative_form(0.5 * (2.0 * nu + 3.0 * dd1) /
                                                           (2.0 * nu + dd1)))};
        tab.cumulative_conjectured = {(nu + dd1) / (2.0 * nu + dd1), 0.0, true,
                                      ostar(matern_cumulative_form((nu + dd1) / (2.0 * nu + dd1)))};
        tab.simple_lower = {2.0 + d / nu, 0.0, true, omega(matern_simple_form(2.0 + d / nu))};
        tab.simple_sri = {2.0 * nu > dd1 ? 2.0 * (2.0 * nu + dd1) / (2.0 * nu - dd1) : 0.0, 0.0,
                          2.0 * nu > dd1,
                          2.0 * nu > dd1
                              ? ostar(matern_simple_form(2.0 * (2.0 * nu + dd1) / (2.0 * nu - dd1)))
                              : "void (needs 2 nu > d(d+1))"};
        tab.simple_conjectured = {2.0 + dd1 / nu, 0.0, true,
                                  ostar(matern_simple_form(2.0 + dd1 / nu))};
    }
    return tab;
}

std::string exponent_table_text(const ExponentTable& tab) {
    const bool se = tab.spec.family == KernelFamily::SquaredExponential;
    std::ostringstream os;
    const std::string kernel = se ? "SE" : "Matern(nu=" + format_double(tab.spec.nu) + ")";
    os << "kernel " << kernel << ", d=" << tab.spec.d
       << "  (poly/poly-log exponents; O*(.) factors dropped)\n";
    auto row = [&](const std::string& name, const ExponentCell& cum, const ExponentCell& sim) {
        os << "  " << name;
        for (std::size_t i = name.size(); i < 14; ++i) os << ' ';
        os << "cumulative: ";
        os << cum.form;
        for (std::size_t i = cum.form.size(); i < 34; ++i) os << ' ';
        os << "time-to-eps: " << sim.form << '\n';
    };
    row("lower bound", tab.cumulative_lower, tab.simple_lower);
    row("[Sri09] form", tab.cumulative_sri, tab.simple_sri);
    row("conjectured", tab.cumulative_conjectured, tab.simple_conjectured);
    return os.str();
}

std::string exponent_table_json(const ExponentTable& tab, int indent) {
    nlohmann::json j;
    j["family"] = tab.spec.family == KernelFamily::SquaredExponential ? "se" : "matern";
    j["d"] = tab.spec.d;
    if (tab.spec.family == KernelFamily::Matern) j["nu"] = tab.spec.nu;
    auto cell = [](const ExponentCell& c) {
        return nlohmann::json{{"t_power", c.t_power},
                              {"log_power", c.log_power},
                              {"valid", c.valid},
                              {"form", c.form}};
    };
    j["cumulative"] = {{"lower", cell(tab.cumulative_lower)},
                       {"sri", cell(tab.cumulative_sri)},
                       {"conjectured", cell(tab.cumulative_conjectured)}};
    j["simple"] = {{"lower", cell(tab.simple_lower)},
                   {"sri", cell(tab.simple_sri)},
                   {"conjectured", cell(tab.simple_conjectured)}};
    j["note"] = "logarithmic O*(.) factors dropped; gamma values are greedy estimates";
    return j.dump(indent);
}

} // namespace needlebench
