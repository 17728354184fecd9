#pragma once

#include <cmath>
#include <stdexcept>

namespace hedgegap::mathkit {

/// Normal law on the Brownian clock; variance is measured in time units,
/// so N(0, t) is the law of B(t).
struct NormalLaw {
    double mean = 0.0;
    double variance = 1.0;

    NormalLaw() = default;
    NormalLaw(double mean_, double variance_) : mean(mean_), variance(variance_) {
        if (!(variance > 0.0)) throw std::invalid_argument("NormalLaw: variance must be > 0");
    }
    double sigma() const { return std::sqrt(variance); }
};

double normal_pdf(double x, const NormalLaw& law = {});
double normal_cdf(double x, const NormalLaw& law = {});

/// 1 - cdf, computed without cancellation in the right tail.
double normal_tail(double x, const NormalLaw& law = {});

/// log of the cdf; stays finite far into the left tail (|z| up to ~1e4),
/// where the cdf itself underflows.
double log_normal_cdf(double x, const NormalLaw& law = {});
double log_normal_tail(double x, const NormalLaw& law = {});

/// Inverse standard normal cdf (Wichura's AS241, double precision).
double normal_quantile(double p);

}  // namespace hedgegap::mathkit
