// Command-line driver: construct/certify needle ensembles, run bandit
// simulations, and tabulate regret bounds from an INI config.

#include <cstdint>
#include <iostream>
#include <string>

#include "needlebench/experiment.hpp"

namespace {

void usage(std::ostream& os) {
    os << "usage: needlebench <construct|simulate|bounds|gamma|certify> --config PATH\n"
          "                   [--out DIR] [--overwrite] [--workers N] [--seed N]\n"
          "\n"
          "exit codes: 0 success, 1 usage/config error, 2 certification failure,\n"
          "            3 numeric failure\n";
}

} // namespace

int main(int argc, char** argv) {
    using namespace needlebench;
    if (argc < 2) {
        usage(std::cerr);
        return kExitUsage;
    }
    const std::string command = argv[1];
    if (command == "-h" || command == "--help" || command == "help") {
        usage(std::cout);
        return kExitOk;
    }

    std::string config_path;
    RunFlags flags;
    for (int i = 2; i < argc; ++i) {
        const std::string arg = argv[i];
        auto need_value = [&](const char* name) -> std::string {
            if (i + 1 >= argc) {
                std::cerr << name << " requires a value\n";
                std::exit(kExitUsage);
            }
            return argv[++i];
        };
        if (arg == "--config") {
            config_path = need_value("--config");
        } else if (arg == "--out") {
            flags.out_dir = need_value("--out");
        } else if (arg == "--overwrite") {
            flags.overwrite = true;
        } else if (arg == "--workers") {
            flags.workers = std::stoi(need_value("--workers"));
            if (flags.workers < 1) {
                std::cerr << "--workers must be at least 1\n";
                return kExitUsage;
            }
        } else if (arg == "--seed") {
            flags.seed = static_cast<std::uint64_t>(std::stoull(need_value("--seed")));
        } else {
            std::cerr << "unknown flag: " << arg << "\n";
            usage(std::cerr);
            return kExitUsage;
        }
    }
    if (config_path.empty()) {
        std::cerr << "--config PATH is required\n";
        usage(std::cerr);
        return kExitUsage;
    }

    try {
        const ExperimentConfig cfg = parse_config_file(config_path);
        return run_command(command, cfg, flags);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
