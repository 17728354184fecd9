#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hedgegap::mathkit {

/// A seeded ensemble of standard Brownian paths sampled on a fixed time grid.
/// Every path starts at 0; increments over [t_k, t_{k+1}] are N(0, t_{k+1}-t_k).
struct PathEnsemble {
    std::vector<double> times;                 // 0 = t_0 < ... < t_K = T
    std::vector<std::vector<double>> values;   // [path][k]
    std::uint64_t seed = 0;

    int path_count() const { return static_cast<int>(values.size()); }
    int step_count() const { return static_cast<int>(times.size()) - 1; }
};

/// Name of the generator recorded in reports, so ensembles are reproducible
/// across machines (no implementation-defined distributions are used).
const char* rng_algorithm();

/// Deterministic given the seed; per-path substreams are derived from the
/// seed via splitmix64, so paths may be generated in parallel.
PathEnsemble generate_paths(double T, std::vector<double> grid, int n_paths,
                            std::uint64_t seed);

}  // namespace hedgegap::mathkit
