#include "hedgegap/paths.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "hedgegap/normal.hpp"

namespace hedgegap::mathkit {

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// uniform in (0,1) from the engine's 64-bit output; bit-reproducible
double next_uniform(std::mt19937_64& eng) {
    return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}
}  // namespace

const char* rng_algorithm() {
    return "mt19937_64(splitmix64 per-path substream) + AS241 inverse-cdf normals";
}

PathEnsemble generate_paths(double T, std::vector<double> grid, int n_paths,
                            std::uint64_t seed) {
    if (grid.size() < 2 || grid.front() != 0.0 || grid.back() != T)
        throw std::domain_error("generate_paths: grid must run from 0 to T");
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1]))
            throw std::domain_error("generate_paths: grid must be strictly increasing");
    if (n_paths < 1) throw std::domain_error("generate_paths: n_paths must be >= 1");

    PathEnsemble ens;
    ens.seed = seed;
    ens.times = std::move(grid);
    const std::size_t K = ens.times.size() - 1;
    ens.values.assign(n_paths, std::vector<double>(K + 1, 0.0));
    for (int p = 0; p < n_paths; ++p) {
        std::mt19937_64 eng(splitmix64(seed ^ (0x9e3779b97f4a7c15ULL * (p + 1))));
        auto& path = ens.values[p];
        double b = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            const double dt = ens.times[k + 1] - ens.times[k];
            b += std::sqrt(dt) * normal_quantile(next_uniform(eng));
            path[k + 1] = b;
        }
    }
    return ens;
}

}  // namespace hedgegap::mathkit
