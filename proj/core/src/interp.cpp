#include "hedgegap/interp.hpp"

#include <cmath>
#include <stdexcept>

namespace hedgegap::mathkit {

UniformCubicSpline::UniformCubicSpline(double x0, double dx, std::vector<double> y)
    : x0_(x0), dx_(dx), y_(std::move(y)) {
    if (y_.size() < 2) throw std::invalid_argument("UniformCubicSpline: need at least 2 knots");
    if (!(dx_ > 0.0)) throw std::invalid_argument("UniformCubicSpline: dx must be > 0");
    const std::size_t n = y_.size();
    m_.assign(n, 0.0);
    if (n == 2) return;
    // Thomas algorithm for the natural-spline tridiagonal system
    std::vector<double> diag(n - 2, 4.0), rhs(n - 2);
    for (std::size_t i = 1; i + 1 < n; ++i)
        rhs[i - 1] = 6.0 * (y_[i - 1] - 2.0 * y_[i] + y_[i + 1]) / (dx_ * dx_);
    for (std::size_t i = 1; i < n - 2; ++i) {
        const double w = 1.0 / diag[i - 1];
        diag[i] -= w;
        rhs[i] -= w * rhs[i - 1];
    }
    for (std::size_t i = n - 2; i-- > 0;) {
        const double upper = (i + 1 < n - 2) ? m_[i + 2] : 0.0;
        m_[i + 1] = (rhs[i] - upper) / diag[i];
    }
}

double UniformCubicSpline::operator()(double x) const {
    const std::size_t n = y_.size();
    if (x <= x0_) return y_.front();
    const double t = (x - x0_) / dx_;
    if (t >= static_cast<double>(n - 1)) return y_.back();
    const std::size_t i = static_cast<std::size_t>(t);
    const double a = x0_ + dx_ * static_cast<double>(i);
    const double u = (x - a) / dx_;          // in [0,1)
    const double v = 1.0 - u;
    const double h2 = dx_ * dx_ / 6.0;
    return v * y_[i] + u * y_[i + 1] +
           h2 * ((v * v * v - v) * m_[i] + (u * u * u - u) * m_[i + 1]);
}

double UniformLinearInterp::operator()(double x) const {
    const std::size_t n = y_.size();
    if (n == 0) return 0.0;
    if (n == 1 || x <= x0_) return y_.front();
    const double t = (x - x0_) / dx_;
    if (t >= static_cast<double>(n - 1)) return y_.back();
    const std::size_t i = static_cast<std::size_t>(t);
    const double u = t - static_cast<double>(i);
    return (1.0 - u) * y_[i] + u * y_[i + 1];
}

}  // namespace hedgegap::mathkit
