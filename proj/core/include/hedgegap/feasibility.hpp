#pragma once

#include <span>

#include "hedgegap/strategy.hpp"

namespace hedgegap::strategies {

struct FeasibilityReport {
    double worst_violation = 0.0;        // min over the evaluation set of div theta(T) + e1
    double violation_probability = 0.0;  // N-joint-law mass of {div theta(T) + e1 < 0}
    double l2_distance_to_target = 0.0;  // || div theta(T) - z ||
};

/// Evaluates div theta(T) + e1 jointly over (B(t_{N-1}), B(T)): the final
/// holding rule is a function of the level at the last rebalance, the
/// payoff and endowment of the terminal level. The violation probability
/// integrates exact normal masses over the violating terminal intervals of
/// every cell; `levels` adds caller-supplied probe points (tails, level
/// crossings) to the built-in scan grid.
FeasibilityReport terminal_feasibility(const SimpleStrategy& strategy,
                                       const economy::MarketModel& model,
                                       std::span<const double> levels);

}  // namespace hedgegap::strategies
