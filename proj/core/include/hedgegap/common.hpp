#pragma once

#include <stdexcept>
#include <string>

namespace hedgegap {

/// Bad or missing run configuration (files, flags, parameter ranges). CLI exit code 1.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A market model that violates one of the construction conditions
/// (endowment mean, peak range, positivity of the second endowment). CLI exit code 2.
struct ModelError : std::runtime_error {
    explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hedgegap
