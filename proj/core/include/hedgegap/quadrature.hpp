#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "hedgegap/gauss_hermite.hpp"
#include "hedgegap/normal.hpp"

namespace hedgegap::mathkit {

struct QuadratureConfig {
    int node_count = 128;
    double truncation_width = 8.0;  // in standard deviations
    double absolute_tolerance = 1e-9;

    void validate() const {
        if (node_count < 16) throw std::invalid_argument("QuadratureConfig: node_count must be >= 16");
        if (!(truncation_width >= 6.0))
            throw std::invalid_argument("QuadratureConfig: truncation_width must be >= 6");
        if (!(absolute_tolerance > 0.0))
            throw std::invalid_argument("QuadratureConfig: absolute_tolerance must be > 0");
    }
};

namespace detail {

template <class F>
double gauss_hermite_expect(const F& h, const NormalLaw& law, int n) {
    const auto& rule = gauss_hermite(n);
    const double scale = law.sigma() * 1.4142135623730951;  // sigma * sqrt(2)
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = law.mean + scale * rule.nodes[i];
        const double v = h(x);
        if (!std::isfinite(v))
            throw std::runtime_error("expect_terminal: non-finite integrand at node x = " +
                                     std::to_string(x));
        acc += rule.weights[i] * v;
    }
    return acc * 0.5641895835477563;  // 1/sqrt(pi)
}

// 16-point Gauss-Legendre on [-1, 1], positive half
inline constexpr std::array<double, 8> kGL16X = {
    0.09501250983763744, 0.2816035507792589, 0.45801677765722737, 0.6178762444026438,
    0.755404408355003,   0.8656312023878318, 0.9445750230732326,  0.9894009349916499};
inline constexpr std::array<double, 8> kGL16W = {
    0.1894506104550685, 0.18260341504492358, 0.16915651939500254, 0.14959598881657674,
    0.12462897125553388, 0.09515851168249279, 0.062253523938647894, 0.027152459411754096};

template <class F>
double gl16_panel(const F& f, double a, double b) {
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 8; ++i) {
        acc += kGL16W[i] * (f(c + hw * kGL16X[i]) + f(c - hw * kGL16X[i]));
    }
    return acc * hw;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 48);

}  // namespace detail

/// E[h(X)] for X ~ law. Gauss-Hermite after a change of variables; if the
/// half-order rule disagrees beyond tolerance (non-smooth integrand), falls
/// back to adaptive Simpson on [mean - w*sigma, mean + w*sigma].
///
/// Caller guarantees h is dominated by a polynomial-times-exponential
/// envelope that is square-integrable against the law; the truncated
/// fallback is only valid under that envelope.
template <class F>
double expect_terminal(const F& h, const NormalLaw& law, const QuadratureConfig& cfg = {}) {
    cfg.validate();
    const double full = detail::gauss_hermite_expect(h, law, cfg.node_count);
    const double half = detail::gauss_hermite_expect(h, law, cfg.node_count / 2);
    const double disagreement = std::fabs(full - half);
    if (disagreement <= std::max(cfg.absolute_tolerance, 1e-12 * std::fabs(full))) return full;
    const double lo = law.mean - cfg.truncation_width * law.sigma();
    const double hi = law.mean + cfg.truncation_width * law.sigma();
    auto weighted = [&](double x) { return h(x) * normal_pdf(x, law); };
    return detail::adaptive_simpson(weighted, lo, hi, cfg.absolute_tolerance);
}

double expect_terminal(const std::function<double(double)>& h, const NormalLaw& law,
                       const QuadratureConfig& cfg = {});

/// E[h(B(T)) | B(t) = x0] for standard Brownian motion, i.e. the expectation
/// of h over N(x0, T - t). Requires 0 <= t < T.
template <class F>
double conditional_expectation(const F& h, double t, double x0, double T,
                               const QuadratureConfig& cfg = {}) {
    if (!(t >= 0.0 && t < T))
        throw std::domain_error("conditional_expectation: requires 0 <= t < T");
    return expect_terminal(h, NormalLaw(x0, T - t), cfg);
}

double conditional_expectation(const std::function<double(double)>& h, double t, double x0,
                               double T, const QuadratureConfig& cfg = {});

/// Integral of h(x) * pdf(x) over a finite interval [lo, hi], by composite
/// Gauss-Legendre panels no wider than sigma/2. Exact endpoints.
double integrate_density(const std::function<double(double)>& h, const NormalLaw& law,
                         double lo, double hi, const QuadratureConfig& cfg = {});

enum class TailSide { above, below };

/// E[h(X) | X >= c] (or <= c) for X ~ law, computed against the exact
/// conditional density. Stable even when the conditioning mass underflows,
/// via log-space weights. h may grow exponentially; panels are extended
/// until the weighted contribution is negligible.
double conditional_tail_mean(const std::function<double(double)>& h, const NormalLaw& law,
                             double c, TailSide side, const QuadratureConfig& cfg = {});

}  // namespace hedgegap::mathkit
