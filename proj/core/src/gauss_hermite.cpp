#include "hedgegap/gauss_hermite.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace hedgegap::mathkit {

namespace {

// Orthonormal Hermite recurrence; returns (H_n(z), H_{n-1}(z)) scaled so that
// the weight follows from the derivative relation. Standard gauher scheme.
GaussHermiteRule build(int n) {
    constexpr double kPiQuarter = 0.7511255444649425;  // pi^{-1/4}
    GaussHermiteRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);

    const int half = (n + 1) / 2;
    double z = 0.0, pp = 0.0;
    for (int i = 0; i < half; ++i) {
        // initial guesses for the i-th largest root
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        } else if (i == 1) {
            z -= 1.14 * std::pow(n, 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * rule.nodes[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * rule.nodes[1];
        } else {
            z = 2.0 * z - rule.nodes[i - 2];
        }
        bool converged = false;
        for (int it = 0; it < 200; ++it) {
            double p1 = kPiQuarter, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double dz = p1 / pp;
            z -= dz;
            if (std::fabs(dz) <= 1e-15 * (1.0 + std::fabs(z))) {
                converged = true;
                break;
            }
        }
        if (!converged) throw std::runtime_error("gauss_hermite: Newton iteration failed");
        rule.nodes[i] = z;
        rule.nodes[n - 1 - i] = -z;
        rule.weights[i] = 2.0 / (pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    // nodes currently descend from the largest; flip to ascending order
    for (int i = 0; i < n / 2; ++i) {
        std::swap(rule.nodes[i], rule.nodes[n - 1 - i]);
        std::swap(rule.weights[i], rule.weights[n - 1 - i]);
    }
    return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite: order must be >= 1");
    static std::map<int, GaussHermiteRule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build(n)).first;
    return it->second;
}

}  // namespace hedgegap::mathkit
