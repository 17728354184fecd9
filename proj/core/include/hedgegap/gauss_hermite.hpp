#pragma once

#include <vector>

namespace hedgegap::mathkit {

/// Nodes and weights for the weight function exp(-x^2) on the whole line.
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Cached rule of order n (Newton iteration on the Hermite recurrence).
/// Thread-safe; n must be >= 1.
const GaussHermiteRule& gauss_hermite(int n);

}  // namespace hedgegap::mathkit
