#pragma once

#include <stdexcept>
#include <string>

namespace needlebench {

// Invalid kernel/algorithm parameters (non-positive lengthscale, bad sigma, ...).
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Ensemble construction rejected (amplitude too large, M < 2, side conditions).
class ConstructionError : public std::runtime_error {
public:
    explicit ConstructionError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical certificate violated its budget beyond the quadrature slack.
class CertificationError : public std::runtime_error {
public:
    explicit CertificationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Quadrature or iteration failed to converge to the requested tolerance.
class AccuracyError : public std::runtime_error {
public:
    explicit AccuracyError(const std::string& msg) : std::runtime_error(msg) {}
};

// Linear algebra breakdown (singular factorization after jitter escalation, ...).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad experiment configuration file or CLI usage.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace needlebench
