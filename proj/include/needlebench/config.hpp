#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "needlebench/algorithms.hpp"
#include "needlebench/kernels.hpp"

namespace needlebench {

// Batch experiment configuration, parsed from INI-style `key = value` lines
// under [section] headers.  Unknown sections or keys are rejected, and module
// preconditions are re-validated at parse time.
struct ExperimentConfig {
    KernelSpec kernel;

    struct {
        double epsilon = 0.01;
        double B = 1.0;
        bool strict = true;
        std::optional<double> w0_override;
        double r_max = 32.0;
        int n_r = 8192;
        int n_quad = 64;
    } ensemble;

    struct {
        double sigma = 0.1;
    } noise;

    struct {
        int T = 100;
        int seeds_per_member = 1;
        int grid_resolution = 256;
    } run;

    AlgorithmConfig algorithm;

    struct {
        std::string dir = "out";
        std::vector<std::string> formats = {"json", "csv"};
    } output;

    // Flat resolved key=value view, embedded in every emitted file.
    std::map<std::string, std::string> resolved() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

} // namespace needlebench
