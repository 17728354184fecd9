#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "hedgegap/equilibrium.hpp"
#include "hedgegap/interp.hpp"
#include "hedgegap/market.hpp"
#include "hedgegap/quadrature.hpp"

namespace hedgegap::certification {

/// Evaluation problem for payoffs of the form
///   Psi = sum_l 1{X_l}(x1) * (a0_l + a1_l * risky(x2)),   x2 = x1 + increment,
/// where x1 is the Brownian level at the partition time and the increment is
/// independent N(0, increment_variance).
///
/// Terminal instance:     x1 = B(t*), x2 = B(T), risky = g, endow = f,
///                        target = z = a - f.
/// Conditional instance:  x1 = B(t**), x2 = B(t*), risky = E[g(B(T))|B(t*)=.],
///                        endow = E[f(B(T))|B(t*)=.], target = a - endow.
/// The two are formally identical, which is why one engine serves both
/// certificate families.
struct TwoTimeProblem {
    bool degenerate_first = false;       // partition time 0: the level is exactly 0
    mathkit::NormalLaw law1{0.0, 1.0};   // level law at the partition time
    double increment_variance = 1.0;
    std::function<double(double)> risky, endow, target;
    double risky_lim_neg = 0.0, risky_lim_pos = 1.0;   // +inf allowed on the right
    double endow_lim_neg = 1.0, endow_lim_pos = 1.0;
    mathkit::QuadratureConfig quad;

    double terminal_sigma() const;   // std dev of x2
};

TwoTimeProblem terminal_problem(const economy::MarketModel& model,
                                const economy::Equilibrium& eq, double t_partition);

/// Conditional problem with partition at t_partition and conditioning at
/// t_star (t_partition < t_star < T). The time-t_star price and endowment
/// value functions are pre-tabulated on splines.
TwoTimeProblem conditional_problem(const economy::MarketModel& model,
                                   const economy::Equilibrium& eq, double t_partition,
                                   double t_star);

/// Per-cell moments against the joint law: mass and the integrals of
/// risky, risky^2, target, target*risky, target^2 restricted to the cell.
/// A candidate's squared distance to the target assembles algebraically
/// from these for any coefficients on the same partition.
struct CellMoments {
    double mass = 0.0;
    double u1 = 0.0, uu = 0.0;
    double tgt = 0.0, tgt_u = 0.0, tgt_sq = 0.0;
};

double cell_objective(const CellMoments& m, const std::array<double, 2>& coeff);

/// Direct nested quadrature (outer Gauss-Legendre panels, inner
/// Gauss-Hermite). Slow and accurate; used for one-off checks and to verify
/// the table-accelerated path.
class TwoTimeEvaluator {
  public:
    explicit TwoTimeEvaluator(TwoTimeProblem problem);
    CellMoments cell_moments(double lo, double hi) const;
    double target_sq_norm() const;
    const TwoTimeProblem& problem() const { return problem_; }

    double distance_sq(std::span<const double> boundaries,
                       std::span<const std::array<double, 2>> coeffs) const;

  private:
    TwoTimeProblem problem_;
};

/// Spline-accelerated moments for search loops: the inner conditional
/// moments are tabulated once on a fine uniform grid, after which a cell
/// integral costs a few Gauss-Legendre panels over the splines.
class MomentTable {
  public:
    MomentTable(const TwoTimeProblem& problem, int grid_points = 8193);
    CellMoments cell_moments(double lo, double hi) const;
    double target_sq_norm() const { return target_sq_; }
    double x_lo() const { return x_lo_; }
    double x_hi() const { return x_hi_; }
    const TwoTimeProblem& problem() const { return problem_; }

  private:
    TwoTimeProblem problem_;
    double x_lo_ = 0.0, x_hi_ = 0.0, target_sq_ = 0.0;
    mathkit::UniformCubicSpline m_u_, m_uu_, m_t_, m_tu_, m_tt_;
};

/// Linear feasibility constraint c0 + ca0*a0 + ca1*a1 >= 0 on a cell's
/// coefficients, derived from the tail limits of the risky payoff and the
/// endowment. For the bounded payoff these are exactly the forced bounds
/// 1 + a0 >= 0 and 1 + a0 + a1 >= 0; for the unbounded payoff they are
/// a1 >= 0 and 1 + a0 >= 0.
struct LinearConstraint {
    double c0 = 0.0, ca0 = 0.0, ca1 = 0.0;
    double residual(const std::array<double, 2>& a) const {
        return c0 + ca0 * a[0] + ca1 * a[1];
    }
};

std::vector<LinearConstraint> feasibility_constraints(const TwoTimeProblem& problem);

/// Minimum constraint residual over all cells (the symbolic tail check of
/// condition (a); exact for the bundled payoff families).
double min_limit_residual(const TwoTimeProblem& problem,
                          std::span<const std::array<double, 2>> coeffs);

/// min over cells and an x2 grid of a0 + a1*risky(x2) + endow(x2); the grid
/// covers [-w*sigma2, +w*sigma2] plus caller-supplied critical points.
double min_interior_value(const TwoTimeProblem& problem,
                          std::span<const std::array<double, 2>> coeffs,
                          std::span<const double> extra_points, int grid_points = 801);

struct ConditionA {
    bool holds = false;
    double min_interior = 0.0;      // grid part, tolerance 1e-9
    double min_limit_residual = 0;  // symbolic part, no tolerance
};

ConditionA check_condition_a(const TwoTimeProblem& problem,
                             std::span<const std::array<double, 2>> coeffs,
                             std::span<const double> extra_points);

/// Exact minimizer of the cell objective subject to the feasibility
/// constraints and the coefficient box (tiny active-set enumeration).
/// With `constrained == false` only the box applies (diagnostic mode).
std::array<double, 2> solve_cell_qp(const CellMoments& m,
                                    const std::vector<LinearConstraint>& constraints,
                                    double box, bool constrained);

}  // namespace hedgegap::certification
