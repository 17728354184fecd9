#pragma once

#include <cstddef>
#include <vector>

namespace hedgegap::mathkit {

/// Natural cubic spline on a uniform grid, with flat extrapolation outside
/// the grid. O(1) evaluation.
class UniformCubicSpline {
  public:
    UniformCubicSpline() = default;
    UniformCubicSpline(double x0, double dx, std::vector<double> y);

    double operator()(double x) const;
    double x_min() const { return x0_; }
    double x_max() const { return x0_ + dx_ * (static_cast<double>(y_.size()) - 1.0); }
    bool empty() const { return y_.empty(); }

  private:
    double x0_ = 0.0;
    double dx_ = 1.0;
    std::vector<double> y_;
    std::vector<double> m_;  // second derivatives at the knots
};

/// Piecewise-linear interpolation on a uniform grid with flat extrapolation.
class UniformLinearInterp {
  public:
    UniformLinearInterp() = default;
    UniformLinearInterp(double x0, double dx, std::vector<double> y)
        : x0_(x0), dx_(dx), y_(std::move(y)) {}

    double operator()(double x) const;

  private:
    double x0_ = 0.0;
    double dx_ = 1.0;
    std::vector<double> y_;
};

}  // namespace hedgegap::mathkit
