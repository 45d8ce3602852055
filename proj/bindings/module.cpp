// Python bindings for the core operations: kernels and spectral densities,
// needle-ensemble construction, RKHS certification, bandit episodes, and the
// regret-bound calculators.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "needlebench/bounds.hpp"
#include "needlebench/rkhs.hpp"
#include "needlebench/simulator.hpp"

namespace py = pybind11;
using namespace needlebench;

namespace {

KernelSpec make_spec(const std::string& family, double l, double nu, int d) {
    KernelSpec spec;
    if (family == "se" || family == "squared_exponential")
        spec.family = KernelFamily::SquaredExponential;
    else if (family == "matern")
        spec.family = KernelFamily::Matern;
    else
        throw ParameterError("family must be 'se' or 'matern'");
    spec.l = l;
    spec.nu = nu;
    spec.d = d;
    spec.validate();
    return spec;
}

AlgorithmKind parse_kind(const std::string& kind) {
    if (kind == "gp_ucb") return AlgorithmKind::GpUcb;
    if (kind == "uniform") return AlgorithmKind::Uniform;
    if (kind == "elimination") return AlgorithmKind::Elimination;
    if (kind == "oracle") return AlgorithmKind::Oracle;
    throw ParameterError("kind must be gp_ucb, uniform, elimination, or oracle");
}

AlgorithmConfig make_algorithm(const std::string& kind, const py::object& beta, int grid_resolution,
                               std::uint64_t seed) {
    AlgorithmConfig cfg;
    cfg.kind = parse_kind(kind);
    if (py::isinstance<py::str>(beta)) {
        if (beta.cast<std::string>() != "theoretical")
            throw ParameterError("beta must be 'theoretical' or a positive number");
        cfg.beta.kind = BetaSchedule::Kind::TheoreticalRkhs;
    } else {
        cfg.beta.kind = BetaSchedule::Kind::Constant;
        cfg.beta.c = beta.cast<double>();
    }
    cfg.grid_resolution = grid_resolution;
    cfg.seed = seed;
    return cfg;
}

} // namespace

PYBIND11_MODULE(needlebench, m) {
    m.doc() = "Adversarial needle ensembles, RKHS certificates, and regret bounds "
              "for Gaussian-process bandits";

    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<ConstructionError>(m, "ConstructionError", PyExc_ValueError);
    py::register_exception<CertificationError>(m, "CertificationError", PyExc_RuntimeError);
    py::register_exception<AccuracyError>(m, "AccuracyError", PyExc_RuntimeError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_RuntimeError);

    py::class_<KernelSpec>(m, "KernelSpec")
        .def(py::init(&make_spec), py::arg("family"), py::arg("l") = 1.0, py::arg("nu") = 1.5,
             py::arg("d") = 1)
        .def_property_readonly(
            "family",
            [](const KernelSpec& s) {
                return s.family == KernelFamily::SquaredExponential ? "se" : "matern";
            })
        .def_readonly("l", &KernelSpec::l)
        .def_readonly("nu", &KernelSpec::nu)
        .def_readonly("d", &KernelSpec::d)
        .def("__repr__", [](const KernelSpec& s) {
            return "KernelSpec(" +
                   std::string(s.family == KernelFamily::SquaredExponential ? "se" : "matern") +
                   ", l=" + std::to_string(s.l) + ", nu=" + std::to_string(s.nu) +
                   ", d=" + std::to_string(s.d) + ")";
        });

    m.def("eval_kernel", &eval_kernel, py::arg("spec"), py::arg("x"), py::arg("y"));
    m.def("eval_kernel_radial", &eval_kernel_radial, py::arg("spec"), py::arg("r"));
    m.def("spectral_density", &spectral_density, py::arg("spec"), py::arg("xi"));
    m.def("spectral_density_radial", &spectral_density_radial, py::arg("spec"), py::arg("rho"));
    m.def("kernel_matrix", &kernel_matrix, py::arg("spec"), py::arg("points"));
    m.def("spectral_mass", &spectral_mass, py::arg("spec"), py::arg("rel_tol") = 1e-9);

    m.def("bump_value", &bump_value, py::arg("xi"));
    py::class_<BumpProfile, std::shared_ptr<BumpProfile>>(m, "BumpProfile")
        .def_readonly("d", &BumpProfile::d)
        .def_readonly("r_grid", &BumpProfile::r_grid)
        .def_readonly("h_values", &BumpProfile::h_values)
        .def_readonly("h0", &BumpProfile::h0)
        .def_readonly("zeta", &BumpProfile::zeta)
        .def_readonly("r_max", &BumpProfile::r_max)
        .def_readonly("quadrature_nodes", &BumpProfile::quadrature_nodes)
        .def("eval", &BumpProfile::eval, py::arg("r"))
        .def("to_csv", [](const BumpProfile& p) { return profile_to_csv(p); });
    m.def(
        "make_profile",
        [](int d, double r_max, int n_r, int n_quad) {
            ProfileOptions opts;
            opts.r_max = r_max;
            opts.n_r = n_r;
            opts.n_quad = n_quad;
            return std::make_shared<BumpProfile>(inverse_transform_profile(d, opts));
        },
        py::arg("d"), py::arg("r_max") = 32.0, py::arg("n_r") = 8192, py::arg("n_quad") = 64);
    m.def("half_width", &half_width, py::arg("profile"));

    py::class_<NeedleEnsemble>(m, "NeedleEnsemble")
        .def_readonly("epsilon", &NeedleEnsemble::epsilon)
        .def_readonly("B", &NeedleEnsemble::B)
        .def_readonly("w0", &NeedleEnsemble::w0)
        .def_readonly("w", &NeedleEnsemble::w)
        .def_readonly("M", &NeedleEnsemble::M)
        .def_readonly("a0", &NeedleEnsemble::a0)
        .def_readonly("degenerate", &NeedleEnsemble::degenerate)
        .def_readonly("relaxed_violations", &NeedleEnsemble::relaxed_violations)
        .def_property_readonly("spec", [](const NeedleEnsemble& e) { return e.spec; })
        .def("center", &NeedleEnsemble::center, py::arg("m"))
        .def("centers", &NeedleEnsemble::centers)
        .def("eval", &eval_needle, py::arg("m"), py::arg("x"))
        .def("region_index", &region_index, py::arg("x"))
        .def("vbar", &vbar, py::arg("m"), py::arg("j"))
        .def("vbar_sums",
             [](const NeedleEnsemble& e) {
                 const VbarSums s = vbar_sums_report(e);
                 return py::make_tuple(s.max_over_m_sum_j, s.max_over_j_sum_m,
                                       s.max_over_j_sum_m_sq);
             })
        .def("to_json", [](const NeedleEnsemble& e) { return ensemble_to_json(e); });
    m.def(
        "build_ensemble",
        [](const KernelSpec& spec, double epsilon, double B,
           std::shared_ptr<BumpProfile> profile, bool strict, const py::object& w0_override) {
            BuildOptions opts;
            opts.strict = strict;
            if (!w0_override.is_none()) opts.w0_override = w0_override.cast<double>();
            return build_ensemble(spec, epsilon, B, std::move(profile), opts);
        },
        py::arg("spec"), py::arg("epsilon"), py::arg("B"), py::arg("profile"),
        py::arg("strict") = true, py::arg("w0_override") = py::none());

    py::class_<NormCertificate>(m, "NormCertificate")
        .def_readonly("norm_numeric", &NormCertificate::norm_numeric)
        .def_readonly("norm_chain_bound", &NormCertificate::norm_chain_bound)
        .def_readonly("budget", &NormCertificate::budget)
        .def_readonly("margin", &NormCertificate::margin)
        .def_readonly("quadrature_error_estimate", &NormCertificate::quadrature_error_estimate)
        .def_readonly("side_conditions_ok", &NormCertificate::side_conditions_ok)
        .def_property_readonly("chain",
                               [](const NormCertificate& c) {
                                   std::vector<std::pair<std::string, double>> out;
                                   for (const ChainStep& s : c.chain)
                                       out.emplace_back(s.label, s.value);
                                   return out;
                               })
        .def_property_readonly("ok", [](const NormCertificate& c) { return certificate_ok(c); })
        .def("to_json", [](const NormCertificate& c) { return certificate_to_json(c); });
    m.def("compute_certificate", &compute_certificate, py::arg("ensemble"));
    m.def("certify_ensemble_norm", &certify_ensemble_norm, py::arg("ensemble"));
    m.def(
        "rkhs_norm_spectral",
        [](const KernelSpec& spec, const std::function<double(double)>& G, double R) {
            return rkhs_norm_spectral(spec, G, R).value;
        },
        py::arg("spec"), py::arg("G_radial"), py::arg("R"));

    py::class_<RegretRecord>(m, "RegretRecord")
        .def_readonly("m", &RegretRecord::m)
        .def_readonly("seed", &RegretRecord::seed)
        .def_readonly("T", &RegretRecord::T)
        .def_readonly("selections", &RegretRecord::selections)
        .def_readonly("observations", &RegretRecord::observations)
        .def_readonly("inst_regret", &RegretRecord::inst_regret)
        .def_readonly("cum_regret", &RegretRecord::cum_regret)
        .def_readonly("simple_curve", &RegretRecord::simple_curve)
        .def_readonly("region_counts", &RegretRecord::region_counts)
        .def_readonly("recommendation", &RegretRecord::recommendation)
        .def_readonly("simple_regret", &RegretRecord::simple_regret)
        .def_readonly("x_star", &RegretRecord::x_star)
        .def_readonly("x_star_bias", &RegretRecord::x_star_bias);
    m.def(
        "run_episode",
        [](const NeedleEnsemble& ens, long long member, const std::string& kind,
           const py::object& beta, int grid_resolution, int T, double sigma, std::uint64_t seed) {
            return run_episode(ens, member, make_algorithm(kind, beta, grid_resolution, seed), T,
                               sigma, seed);
        },
        py::arg("ensemble"), py::arg("member"), py::arg("kind") = "gp_ucb",
        py::arg("beta") = "theoretical", py::arg("grid_resolution") = 256, py::arg("T") = 100,
        py::arg("sigma") = 0.1, py::arg("seed") = 0);
    m.def(
        "run_ensemble_average",
        [](const NeedleEnsemble& ens, const std::string& kind, const py::object& beta,
           int grid_resolution, int T, double sigma, int seeds_per_member, std::uint64_t seed,
           int workers) {
            const AverageReport rep =
                run_ensemble_average(ens, make_algorithm(kind, beta, grid_resolution, seed), T,
                                     sigma, seeds_per_member, workers);
            py::dict out;
            out["episodes"] = rep.episodes;
            out["mean_inst"] = rep.mean_inst;
            out["se_inst"] = rep.se_inst;
            out["mean_cum"] = rep.mean_cum;
            out["se_cum"] = rep.se_cum;
            out["mean_simple"] = rep.mean_simple;
            out["se_simple"] = rep.se_simple;
            out["mean_final_simple"] = rep.mean_final_simple;
            out["se_final_simple"] = rep.se_final_simple;
            return out;
        },
        py::arg("ensemble"), py::arg("kind") = "gp_ucb", py::arg("beta") = "theoretical",
        py::arg("grid_resolution") = 256, py::arg("T") = 100, py::arg("sigma") = 0.1,
        py::arg("seeds_per_member") = 1, py::arg("seed") = 0, py::arg("workers") = 1);
    m.def("divergence_bound", &divergence_bound, py::arg("ensemble"), py::arg("m"),
          py::arg("region_counts"), py::arg("sigma"));
    m.def(
        "uninformed_simple_regret",
        [](const NeedleEnsemble& ens, int grid_resolution) {
            return uninformed_simple_regret(ens, Grid(ens.spec.d, grid_resolution));
        },
        py::arg("ensemble"), py::arg("grid_resolution") = 256);

    m.def("gaussian_kl", &gaussian_kl, py::arg("mu1"), py::arg("mu2"), py::arg("sigma"));
    m.def("auer_gap", &auer_gap, py::arg("e0"), py::arg("A"), py::arg("div"));
    m.def("high_prob_conversion", &high_prob_conversion, py::arg("eta"));
    m.def("upper_bound_sri", &upper_bound_sri, py::arg("gamma"), py::arg("B"), py::arg("T"));
    m.def(
        "simple_regret_threshold",
        [](const KernelSpec& spec, const BumpProfile& profile, double epsilon, double B,
           double sigma, double C) {
            return simple_regret_threshold(spec, profile, epsilon, B, sigma, C);
        },
        py::arg("spec"), py::arg("profile"), py::arg("epsilon"), py::arg("B"), py::arg("sigma"),
        py::arg("C") = 1.0);
    m.def(
        "cumulative_regret_lower",
        [](const KernelSpec& spec, const BumpProfile& profile, double T, double B, double sigma,
           double C_prime) {
            const CumulativeLower cum = cumulative_regret_lower(spec, profile, T, B, sigma, C_prime);
            py::dict out;
            out["R_lower"] = cum.R_lower;
            out["eps_star"] = cum.eps_star;
            out["residual"] = cum.residual;
            out["M"] = cum.M;
            return out;
        },
        py::arg("spec"), py::arg("profile"), py::arg("T"), py::arg("B"), py::arg("sigma"),
        py::arg("C_prime") = 1.0);
    m.def(
        "info_gain_greedy",
        [](const KernelSpec& spec, int grid_resolution, int T, double sigma) {
            const Grid grid(spec.d, grid_resolution);
            std::vector<Point> pts;
            pts.reserve(static_cast<std::size_t>(grid.size()));
            for (long long i = 0; i < grid.size(); ++i) pts.push_back(grid.point(i));
            std::vector<double> gammas;
            for (const auto& [t, g] : info_gain_greedy(spec, pts, T, sigma)) gammas.push_back(g);
            return gammas;
        },
        py::arg("spec"), py::arg("grid_resolution"), py::arg("T"), py::arg("sigma"));
    m.def("calibrate_constant", &calibrate_constant, py::arg("ensemble"));
    m.def(
        "exponent_table",
        [](const KernelSpec& spec) {
            const ExponentTable tab = exponent_table(spec);
            auto cell = [](const ExponentCell& c) {
                py::dict d;
                d["t_power"] = c.t_power;
                d["log_power"] = c.log_power;
                d["valid"] = c.valid;
                d["form"] = c.form;
                return d;
            };
            py::dict out;
            out["cumulative_lower"] = cell(tab.cumulative_lower);
            out["cumulative_sri"] = cell(tab.cumulative_sri);
            out["cumulative_conjectured"] = cell(tab.cumulative_conjectured);
            out["simple_lower"] = cell(tab.simple_lower);
            out["simple_sri"] = cell(tab.simple_sri);
            out["simple_conjectured"] = cell(tab.simple_conjectured);
            return out;
        },
        py::arg("spec"));
    m.def("exponent_table_text",
          [](const KernelSpec& spec) { return exponent_table_text(exponent_table(spec)); });
}
