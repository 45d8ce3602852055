#include "needlebench/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "needlebench/csv.hpp"
#include "needlebench/errors.hpp"

namespace needlebench {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
    }
}

long long to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    const std::string s = lower(v);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    bool family_set = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            section = lower(trim(line.substr(1, line.size() - 2)));
            if (section != "kernel" && section != "ensemble" && section != "noise" &&
                section != "run" && section != "algorithm" && section != "output")
                throw ConfigError("unknown config section [" + section + "]");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = lower(trim(line.substr(0, eq)));
        const std::string value = trim(line.substr(eq + 1));
        const std::string full = section + "." + key;

        if (section == "kernel") {
            if (key == "family") {
                const std::string f = lower(value);
                if (f == "se" || f == "squared_exponential" || f == "squaredexponential")
                    cfg.kernel.family = KernelFamily::SquaredExponential;
                else if (f == "matern")
                    cfg.kernel.family = KernelFamily::Matern;
                else
                    throw ConfigError("kernel.family must be 'se' or 'matern'");
                family_set = true;
            } else if (key == "l")
                cfg.kernel.l = to_double(full, value);
            else if (key == "nu")
                cfg.kernel.nu = to_double(full, value);
            else if (key == "d")
                cfg.kernel.d = static_cast<int>(to_int(full, value));
            else
                throw ConfigError("unknown config key '" + full + "'");
        } else if (section == "ensemble") {
            if (key == "epsilon")
                cfg.ensemble.epsilon = to_double(full, value);
            else if (key == "b")
                cfg.ensemble.B = to_double(full, value);
            else if (key == "strict")
                cfg.ensemble.strict = to_bool(full, value);
            else if (key == "w0_override")
                cfg.ensemble.w0_override = to_double(full, value);
            else if (key == "r_max")
                cfg.ensemble.r_max = to_double(full, value);
            else if (key == "n_r")
                cfg.ensemble.n_r = static_cast<int>(to_int(full, value));
            else if (key == "n_quad")
                cfg.ensemble.n_quad = static_cast<int>(to_int(full, value));
            else
                throw ConfigError("unknown config key '" + full + "'");
        } else if (section == "noise") {
            if (key == "sigma")
                cfg.noise.sigma = to_double(full, value);
            else
                throw ConfigError("unknown config key '" + full + "'");
        } else if (section == "run") {
            if (key == "t")
                cfg.run.T = static_cast<int>(to_int(full, value));
            else if (key == "seeds_per_member")
                cfg.run.seeds_per_member = static_cast<int>(to_int(full, value));
            else if (key == "grid_resolution")
                cfg.run.grid_resolution = static_cast<int>(to_int(full, value));
            else
                throw ConfigError("unknown config key '" + full + "'");
        } else if (section == "algorithm") {
            if (key == "kind") {
                const std::string k = lower(value);
                if (k == "gp_ucb" || k == "gpucb" || k == "ucb")
                    cfg.algorithm.kind = AlgorithmKind::GpUcb;
                else if (k == "uniform")
                    cfg.algorithm.kind = AlgorithmKind::Uniform;
                else if (k == "elimination")
                    cfg.algorithm.kind = AlgorithmKind::Elimination;
                else if (k == "oracle")
                    cfg.algorithm.kind = AlgorithmKind::Oracle;
                else
                    throw ConfigError(
                        "algorithm.kind must be gp_ucb, uniform, elimination, or oracle");
            } else if (key == "beta") {
                if (lower(value) == "theoretical") {
                    cfg.algorithm.beta.kind = BetaSchedule::Kind::TheoreticalRkhs;
                } else {
                    cfg.algorithm.beta.kind = BetaSchedule::Kind::Constant;
                    cfg.algorithm.beta.c = to_double(full, value);
                }
            } else if (key == "seed")
                cfg.algorithm.seed = static_cast<std::uint64_t>(to_int(full, value));
            else
                throw ConfigError("unknown config key '" + full + "'");
        } else if (section == "output") {
            if (key == "dir")
                cfg.output.dir = value;
            else if (key == "formats") {
                cfg.output.formats.clear();
                std::istringstream fs(value);
                std::string tok;
                while (std::getline(fs, tok, ',')) {
                    tok = lower(trim(tok));
                    if (tok != "json" && tok != "csv")
                        throw ConfigError("output.formats entries must be json or csv");
                    cfg.output.formats.push_back(tok);
                }
            } else
                throw ConfigError("unknown config key '" + full + "'");
        } else {
            throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
        }
    }
    (void)family_set;

    // Re-validate module preconditions up front so command code can assume them.
    cfg.kernel.validate();
    if (!(cfg.ensemble.epsilon > 0.0)) throw ConfigError("ensemble.epsilon must be positive");
    if (!(cfg.ensemble.B > 0.0)) throw ConfigError("ensemble.b must be positive");
    if (!(cfg.noise.sigma > 0.0)) throw ConfigError("noise.sigma must be positive");
    if (cfg.run.T < 1) throw ConfigError("run.t must be at least 1");
    if (cfg.run.seeds_per_member < 1) throw ConfigError("run.seeds_per_member must be at least 1");
    if (cfg.run.grid_resolution < 2) throw ConfigError("run.grid_resolution must be at least 2");
    if (cfg.ensemble.n_r < 64 || cfg.ensemble.n_quad < 64)
        throw ConfigError("ensemble.n_r and ensemble.n_quad must be at least 64");
    if (!(cfg.ensemble.r_max > 0.0)) throw ConfigError("ensemble.r_max must be positive");
    if (cfg.algorithm.beta.kind == BetaSchedule::Kind::Constant && !(cfg.algorithm.beta.c > 0.0))
        throw ConfigError("algorithm.beta constant must be positive");
    cfg.algorithm.grid_resolution = cfg.run.grid_resolution;
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::map<std::string, std::string> ExperimentConfig::resolved() const {
    std::map<std::string, std::string> m;
    m["kernel.family"] = kernel.family == KernelFamily::SquaredExponential ? "se" : "matern";
    m["kernel.l"] = format_double(kernel.l);
    if (kernel.family == KernelFamily::Matern) m["kernel.nu"] = format_double(kernel.nu);
    m["kernel.d"] = std::to_string(kernel.d);
    m["ensemble.epsilon"] = format_double(ensemble.epsilon);
    m["ensemble.b"] = format_double(ensemble.B);
    m["ensemble.strict"] = ensemble.strict ? "true" : "false";
    if (ensemble.w0_override) m["ensemble.w0_override"] = format_double(*ensemble.w0_override);
    m["ensemble.r_max"] = format_double(ensemble.r_max);
    m["ensemble.n_r"] = std::to_string(ensemble.n_r);
    m["ensemble.n_quad"] = std::to_string(ensemble.n_quad);
    m["noise.sigma"] = format_double(noise.sigma);
    m["run.t"] = std::to_string(run.T);
    m["run.seeds_per_member"] = std::to_string(run.seeds_per_member);
    m["run.grid_resolution"] = std::to_string(run.grid_resolution);
    switch (algorithm.kind) {
        case AlgorithmKind::GpUcb: m["algorithm.kind"] = "gp_ucb"; break;
        case AlgorithmKind::Uniform: m["algorithm.kind"] = "uniform"; break;
        case AlgorithmKind::Elimination: m["algorithm.kind"] = "elimination"; break;
        case AlgorithmKind::Oracle: m["algorithm.kind"] = "oracle"; break;
    }
    m["algorithm.beta"] = algorithm.beta.kind == BetaSchedule::Kind::TheoreticalRkhs
                              ? "theoretical"
                              : format_double(algorithm.beta.c);
    m["algorithm.seed"] = std::to_string(algorithm.seed);
    m["output.dir"] = output.dir;
    std::string fm;
    for (const std::string& f : output.formats) {
        if (!fm.empty()) fm += ',';
        fm += f;
    }
    m["output.formats"] = fm;
    return m;
}

} // namespace needlebench
