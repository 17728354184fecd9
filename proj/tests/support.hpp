#pragma once

// Shared test oracles: Monte Carlo means with standard errors, a plain
// Simpson integrator, and chi-square thresholds. These stay independent of
// the library's quadrature path on purpose.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <utility>

#include "hedgegap/normal.hpp"

namespace testsupport {

inline double uniform01(std::mt19937_64& eng) {
    return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double normal_draw(std::mt19937_64& eng) {
    return hedgegap::mathkit::normal_quantile(uniform01(eng));
}

struct McResult {
    double mean = 0.0;
    double se = 0.0;
};

/// Monte Carlo estimate of E[h(X)], X ~ law, with its standard error.
inline McResult mc_mean(const std::function<double(double)>& h,
                        const hedgegap::mathkit::NormalLaw& law, long n, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    double sum = 0.0, sumsq = 0.0;
    for (long i = 0; i < n; ++i) {
        const double x = law.mean + law.sigma() * normal_draw(eng);
        const double v = h(x);
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / static_cast<double>(n);
    const double var = sumsq / static_cast<double>(n) - mean * mean;
    return {mean, std::sqrt(std::max(0.0, var) / static_cast<double>(n))};
}

/// Composite Simpson on [a, b]; n must be even.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

/// Upper chi-square quantile via the Wilson-Hilferty cube approximation.
inline double chi_square_upper(double dof, double z) {
    const double c = 2.0 / (9.0 * dof);
    const double t = 1.0 - c + z * std::sqrt(c);
    return dof * t * t * t;
}

}  // namespace testsupport
