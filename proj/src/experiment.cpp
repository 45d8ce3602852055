#include "needlebench/experiment.hpp"

#include <atomic>
#include <chrono>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "needlebench/bounds.hpp"
#include "needlebench/csv.hpp"
#include "needlebench/ensemble.hpp"
#include "needlebench/rkhs.hpp"
#include "needlebench/simulator.hpp"

namespace needlebench {

namespace {

namespace fs = std::filesystem;

fs::path resolve_out_dir(const ExperimentConfig& cfg, const RunFlags& flags,
                         const std::string& command) {
    const fs::path base = flags.out_dir ? fs::path(*flags.out_dir) : fs::path(cfg.output.dir);
    if (flags.overwrite) {
        fs::create_directories(base);
        return base;
    }
    static std::atomic<int> counter{0};
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y%m%d-%H%M%S", std::gmtime(&tt));
    const fs::path dir = base / (command + "-" + stamp + "-" + std::to_string(::getpid()) +
                                 "-" + std::to_string(counter++));
    fs::create_directories(dir);
    return dir;
}

// Provenance block: the full resolved config as '#' comment lines, placed
// before the mandatory CSV header row.
std::string provenance_comment(const ExperimentConfig& cfg) {
    std::string out;
    for (const auto& [k, v] : cfg.resolved()) out += "# " + k + " = " + v + "\n";
    return out;
}

nlohmann::json provenance_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    for (const auto& [k, v] : cfg.resolved()) j[k] = v;
    return j;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << content;
}

ExperimentConfig with_overrides(ExperimentConfig cfg, const RunFlags& flags) {
    if (flags.seed) cfg.algorithm.seed = *flags.seed;
    return cfg;
}

struct Built {
    std::shared_ptr<const BumpProfile> profile;
    NeedleEnsemble ensemble;
};

Built build_from_config(const ExperimentConfig& cfg) {
    ProfileOptions popts;
    popts.r_max = cfg.ensemble.r_max;
    popts.n_r = cfg.ensemble.n_r;
    popts.n_quad = cfg.ensemble.n_quad;
    auto profile =
        std::make_shared<const BumpProfile>(inverse_transform_profile(cfg.kernel.d, popts));
    BuildOptions bopts;
    bopts.strict = cfg.ensemble.strict;
    bopts.w0_override = cfg.ensemble.w0_override;
    NeedleEnsemble ens =
        build_ensemble(cfg.kernel, cfg.ensemble.epsilon, cfg.ensemble.B, profile, bopts);
    return {std::move(profile), std::move(ens)};
}

std::string attach_config(const std::string& json_text, const ExperimentConfig& cfg) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    j["config"] = provenance_json(cfg);
    return j.dump(2) + "\n";
}

bool wants(const ExperimentConfig& cfg, const std::string& fmt) {
    for (const std::string& f : cfg.output.formats)
        if (f == fmt) return true;
    return false;
}

} // namespace

int cmd_construct(const ExperimentConfig& cfg0, const RunFlags& flags) {
    const ExperimentConfig cfg = with_overrides(cfg0, flags);
    const fs::path dir = resolve_out_dir(cfg, flags, "construct");
    const Built b = build_from_config(cfg);
    const NormCertificate cert = compute_certificate(b.ensemble);
    if (wants(cfg, "json")) {
        write_file(dir / "ensemble.json", attach_config(ensemble_to_json(b.ensemble), cfg));
        write_file(dir / "certificate.json", attach_config(certificate_to_json(cert), cfg));
    }
    if (wants(cfg, "csv")) {
        write_file(dir / "profile.csv", provenance_comment(cfg) + profile_to_csv(*b.profile));
    }
    std::cout << "construct: M=" << b.ensemble.M << " w0=" << format_double(b.ensemble.w0)
              << " margin=" << format_double(cert.margin) << " -> " << dir.string() << "\n";
    return certificate_ok(cert) ? kExitOk : kExitCertification;
}

int cmd_certify(const ExperimentConfig& cfg0, const RunFlags& flags) {
    const ExperimentConfig cfg = with_overrides(cfg0, flags);
    const fs::path dir = resolve_out_dir(cfg, flags, "certify");
    const Built b = build_from_config(cfg);
    const NormCertificate cert = compute_certificate(b.ensemble);
    write_file(dir / "certificate.json", attach_config(certificate_to_json(cert), cfg));
    std::cout << "certify: norm=" << format_double(cert.norm_numeric)
              << " chain_bound=" << format_double(cert.norm_chain_bound)
              << " budget=" << format_double(cert.budget)
              << " margin=" << format_double(cert.margin)
              << (certificate_ok(cert) ? " (ok)" : " (FAILED)") << "\n";
    return certificate_ok(cert) ? kExitOk : kExitCertification;
}

int cmd_simulate(const ExperimentConfig& cfg0, const RunFlags& flags) {
    const ExperimentConfig cfg = with_overrides(cfg0, flags);
    const fs::path dir = resolve_out_dir(cfg, flags, "simulate");
    const Built b = build_from_config(cfg);
    const AverageReport rep = run_ensemble_average(b.ensemble, cfg.algorithm, cfg.run.T,
                                                   cfg.noise.sigma, cfg.run.seeds_per_member,
                                                   flags.workers);
    const Grid grid(cfg.kernel.d, cfg.run.grid_resolution);

    std::string episodes = provenance_comment(cfg);
    episodes += "episode_id,m,seed,t";
    for (int k = 1; k <= cfg.kernel.d; ++k) episodes += ",x_" + std::to_string(k);
    episodes += ",y,r_inst,r_cum\n";
    for (std::size_t e = 0; e < rep.records.size(); ++e) {
        const RegretRecord& r = rep.records[e];
        for (int t = 0; t < r.T; ++t) {
            episodes += std::to_string(e);
            episodes += ',';
            episodes += std::to_string(r.m);
            episodes += ',';
            episodes += std::to_string(r.seed);
            episodes += ',';
            episodes += std::to_string(t + 1);
            for (double c : grid.coords(r.selections[static_cast<std::size_t>(t)])) {
                episodes += ',';
                episodes += format_double(c);
            }
            episodes += ',';
            episodes += format_double(r.observations[static_cast<std::size_t>(t)]);
            episodes += ',';
            episodes += format_double(r.inst_regret[static_cast<std::size_t>(t)]);
            episodes += ',';
            episodes += format_double(r.cum_regret[static_cast<std::size_t>(t)]);
            episodes += '\n';
        }
    }
    write_file(dir / "episodes.csv", episodes);

    std::string summary = provenance_comment(cfg);
    summary += "t,mean_cum_regret,se_cum_regret,mean_simple_regret,se_simple_regret\n";
    for (int t = 0; t < rep.T; ++t) {
        summary += std::to_string(t + 1);
        summary += ',';
        summary += format_double(rep.mean_cum[static_cast<std::size_t>(t)]);
        summary += ',';
        summary += format_double(rep.se_cum[static_cast<std::size_t>(t)]);
        summary += ',';
        summary += format_double(rep.mean_simple[static_cast<std::size_t>(t)]);
        summary += ',';
        summary += format_double(rep.se_simple[static_cast<std::size_t>(t)]);
        summary += '\n';
    }
    write_file(dir / "summary.csv", summary);

    if (wants(cfg, "json")) {
        nlohmann::json meta;
        meta["M"] = b.ensemble.M;
        meta["episodes"] = rep.episodes;
        meta["mean_final_simple_regret"] = rep.mean_final_simple;
        meta["se_final_simple_regret"] = rep.se_final_simple;
        nlohmann::json bias = nlohmann::json::array();
        for (long long m = 0; m < b.ensemble.M && m < static_cast<long long>(rep.records.size());
             ++m)
            bias.push_back(rep.records[static_cast<std::size_t>(m * cfg.run.seeds_per_member)]
                               .x_star_bias);
        meta["x_star_bias"] = bias; // grid-quantization gap 2 eps - f_m(x*), per member
        meta["config"] = provenance_json(cfg);
        write_file(dir / "run_meta.json", meta.dump(2) + "\n");
    }
    std::cout << "simulate: episodes=" << rep.episodes
              << " mean_final_simple_regret=" << format_double(rep.mean_final_simple) << " -> "
              << dir.string() << "\n";
    return kExitOk;
}

int cmd_bounds(const ExperimentConfig& cfg0, const RunFlags& flags) {
    const ExperimentConfig cfg = with_overrides(cfg0, flags);
    const fs::path dir = resolve_out_dir(cfg, flags, "bounds");
    ProfileOptions popts;
    popts.r_max = cfg.ensemble.r_max;
    popts.n_r = cfg.ensemble.n_r;
    popts.n_quad = cfg.ensemble.n_quad;
    const BumpProfile profile = inverse_transform_profile(cfg.kernel.d, popts);

    const EnsembleGeometry geom =
        ensemble_geometry(cfg.kernel, cfg.ensemble.epsilon, cfg.ensemble.B, profile);
    const double threshold = simple_regret_threshold_for_count(geom.M, cfg.ensemble.epsilon,
                                                               cfg.noise.sigma, 1.0);
    const CumulativeLower cum = cumulative_regret_lower(cfg.kernel, profile, cfg.run.T,
                                                        cfg.ensemble.B, cfg.noise.sigma);

    const Grid grid(cfg.kernel.d, cfg.run.grid_resolution);
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(grid.size()));
    for (long long i = 0; i < grid.size(); ++i) pts.push_back(grid.point(i));
    const auto gamma = info_gain_greedy(cfg.kernel, pts, cfg.run.T, cfg.noise.sigma);
    const double gamma_T = gamma.empty() ? 0.0 : gamma.back().second;
    const double sri = upper_bound_sri(gamma_T, cfg.ensemble.B, cfg.run.T);
    const ExponentTable table = exponent_table(cfg.kernel);

    nlohmann::json j;
    j["kernel"] = {{"family", cfg.kernel.family == KernelFamily::SquaredExponential ? "se" : "matern"},
                   {"l", cfg.kernel.l},
                   {"nu", cfg.kernel.nu},
                   {"d", cfg.kernel.d}};
    j["epsilon"] = cfg.ensemble.epsilon;
    j["B"] = cfg.ensemble.B;
    j["sigma"] = cfg.noise.sigma;
    j["T"] = cfg.run.T;
    j["M"] = geom.M;
    j["T_threshold_simple"] = threshold;
    j["R_lower_cumulative"] = cum.R_lower;
    j["eps_star"] = cum.eps_star;
    j["fixed_point_residual"] = cum.residual;
    nlohmann::json gj = nlohmann::json::array();
    const int stride = std::max(1, cfg.run.T / 256);
    for (std::size_t i = 0; i < gamma.size(); ++i) {
        if (gamma[i].first % stride == 0 || i + 1 == gamma.size())
            gj.push_back({gamma[i].first, gamma[i].second});
    }
    j["gamma_estimates"] = gj;
    j["gamma_is_greedy_estimate"] = true;
    j["upper_bound_sri"] = sri;
    j["exponent_table"] = nlohmann::json::parse(exponent_table_json(table));
    j["config"] = provenance_json(cfg);
    write_file(dir / "bounds.json", j.dump(2) + "\n");

    std::ostringstream text;
    text << exponent_table_text(table);
    text << "T_threshold_simple (C=1): " << format_double(threshold) << "\n";
    text << "R_lower_cumulative (C'=1, T=" << cfg.run.T << "): " << format_double(cum.R_lower)
         << "  eps_star=" << format_double(cum.eps_star) << "\n";
    text << "gamma_hat_T (greedy estimate): " << format_double(gamma_T)
         << "  upper_bound_sri: " << format_double(sri) << "\n";
    write_file(dir / "bounds.txt", text.str());
    std::cout << text.str();
    return kExitOk;
}

int cmd_gamma(const ExperimentConfig& cfg0, const RunFlags& flags) {
    const ExperimentConfig cfg = with_overrides(cfg0, flags);
    const fs::path dir = resolve_out_dir(cfg, flags, "gamma");
    const Grid grid(cfg.kernel.d, cfg.run.grid_resolution);
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(grid.size()));
    for (long long i = 0; i < grid.size(); ++i) pts.push_back(grid.point(i));
    const auto gamma = info_gain_greedy(cfg.kernel, pts, cfg.run.T, cfg.noise.sigma);
    std::string csv = provenance_comment(cfg) + "t,gamma_hat\n";
    for (const auto& [t, g] : gamma) {
        csv += std::to_string(t);
        csv += ',';
        csv += format_double(g);
        csv += '\n';
    }
    write_file(dir / "gamma.csv", csv);
    std::cout << "gamma: T=" << cfg.run.T
              << " gamma_hat_T=" << format_double(gamma.empty() ? 0.0 : gamma.back().second)
              << " -> " << dir.string() << "\n";
    return kExitOk;
}

int run_command(const std::string& command, const ExperimentConfig& cfg, const RunFlags& flags) {
    try {
        if (command == "construct") return cmd_construct(cfg, flags);
        if (command == "simulate") return cmd_simulate(cfg, flags);
        if (command == "bounds") return cmd_bounds(cfg, flags);
        if (command == "gamma") return cmd_gamma(cfg, flags);
        if (command == "certify") return cmd_certify(cfg, flags);
        std::cerr << "unknown command: " << command << "\n";
        return kExitUsage;
    } catch (const CertificationError& e) {
        std::cerr << "certification failure: " << e.what() << "\n";
        return kExitCertification;
    } catch (const AccuracyError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

} // namespace needlebench
