#pragma once

#include <limits>
#include <string>
#include <vector>

namespace hedgegap::economy {

enum class FunctionFamily { gaussian_bump, logistic, exponential, custom_table };

std::string to_string(FunctionFamily family);
FunctionFamily function_family_from_string(const std::string& name);

/// Parametric smooth scalar function: the endowment bumps, asset payoffs and
/// test shapes used throughout. Supports evaluation, differentiation,
/// monotone-branch inversion and tail limits.
///
/// Families:
///   gaussian_bump  base + (peak-base) * exp(-x^2 / (2 width^2))
///   logistic       1 / (1 + exp(-x/scale)), limits 0 and 1
///   exponential    scale * exp(rate*x), limits 0 and +inf, convex
///   custom_table   piecewise-linear through knots, flat outside
class FunctionSpec {
  public:
    static FunctionSpec gaussian_bump(double base, double peak, double width);
    static FunctionSpec logistic(double scale = 1.0);
    static FunctionSpec exponential(double rate = 1.0, double scale = 1.0);
    static FunctionSpec custom_table(std::vector<double> xs, std::vector<double> ys);
    static FunctionSpec constant(double c) { return custom_table({0.0}, {c}); }

    double operator()(double x) const;
    double derivative(double x) const;

    /// Limits at -inf / +inf; +inf is encoded as std::numeric_limits<double>::infinity().
    double limit_neg() const;
    double limit_pos() const;
    bool bounded() const;
    bool convex() const;   // true only for the exponential family

    /// Inverts the function on a monotone branch between xlo and xhi
    /// (Brent). Throws std::domain_error if level is not bracketed there.
    double invert_on(double level, double xlo, double xhi, double tol = 1e-13) const;

    FunctionFamily family() const { return family_; }
    double base() const { return p0_; }
    double peak() const { return p1_; }
    double width() const { return p2_; }
    double rate() const { return p0_; }
    double scale() const { return p1_; }
    const std::vector<double>& knots_x() const { return xs_; }
    const std::vector<double>& knots_y() const { return ys_; }

  private:
    FunctionSpec() = default;
    FunctionFamily family_ = FunctionFamily::custom_table;
    double p0_ = 0.0, p1_ = 0.0, p2_ = 0.0;
    std::vector<double> xs_, ys_;
};

/// Strictly increasing, strictly concave felicity. The equilibrium value is
/// felicity-independent; the solver only uses u' to verify first-order
/// conditions.
struct FelicitySpec {
    enum class Kind { log, crra };
    Kind kind = Kind::log;
    double crra_eta = 2.0;  // relative risk aversion when kind == crra

    double marginal(double x) const;
    std::string name() const;
};

}  // namespace hedgegap::economy
