#pragma once

#include <functional>

namespace hedgegap::mathkit {

/// Brent's method on a bracketing interval [lo, hi] with h(lo)*h(hi) < 0.
/// Returns x with |h(x)| <= tol or bracket width <= tol.
/// Throws std::domain_error if the bracket does not change sign.
double brent_root(const std::function<double(double)>& h, double lo, double hi,
                  double tol = 1e-12, int max_iter = 200);

}  // namespace hedgegap::mathkit
