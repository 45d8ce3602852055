#pragma once

#include <optional>
#include <string>

#include "needlebench/config.hpp"

namespace needlebench {

struct RunFlags {
    std::optional<std::string> out_dir;   // --out override
    bool overwrite = false;               // write into the base dir, no timestamped subdir
    int workers = 1;                      // episode worker pool size
    std::optional<std::uint64_t> seed;    // --seed override
};

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitCertification = 2;
inline constexpr int kExitNumeric = 3;

int cmd_construct(const ExperimentConfig& cfg, const RunFlags& flags);
int cmd_simulate(const ExperimentConfig& cfg, const RunFlags& flags);
int cmd_bounds(const ExperimentConfig& cfg, const RunFlags& flags);
int cmd_gamma(const ExperimentConfig& cfg, const RunFlags& flags);
int cmd_certify(const ExperimentConfig& cfg, const RunFlags& flags);

// Maps thrown library errors onto the exit-code contract and prints a
// single-line diagnostic to stderr.
int run_command(const std::string& command, const ExperimentConfig& cfg, const RunFlags& flags);

} // namespace needlebench
