#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hedgegap/equilibrium.hpp"
#include "hedgegap/market.hpp"

namespace hedgegap::strategies {

using Portfolio = std::array<double, 2>;  // (bond, risky) holdings

/// Piecewise-constant function of the Brownian level at one trade time:
/// cells are the intervals between breakpoints, each carrying a (bond,
/// risky) pair. This is the measurability representation everywhere in the
/// project: holdings on (t_i, t_{i+1}] depend only on B(t_i).
struct PortfolioRule {
    std::vector<double> breakpoints;  // strictly increasing; cells = size + 1
    std::vector<Portfolio> coeffs;    // one per cell

    static PortfolioRule constant(Portfolio pf) { return {{}, {pf}}; }

    std::size_t cell_count() const { return coeffs.size(); }
    std::size_t cell_index(double x) const;
    Portfolio at(double x) const { return coeffs[cell_index(x)]; }
    /// Cell bounds, with +/-inf for the outer cells.
    std::pair<double, double> cell_bounds(std::size_t cell) const;
    void validate() const;  // throws std::domain_error on malformed partitions
};

struct SimpleStrategy {
    std::vector<double> trade_times;     // 0 = t_0 < ... < t_N = T
    std::vector<PortfolioRule> holdings; // N rules; rule i applies on (t_i, t_{i+1}]

    std::size_t interval_count() const { return holdings.size(); }
    void validate() const;
};

/// Countably many trade times accumulating only at the horizon, given as
/// generators plus the horizon. Only finitely many trades happen before any
/// t < T, so truncations are honest simple strategies.
struct AlmostSimpleStrategy {
    double horizon = 1.0;
    std::function<double(int)> time_at;          // i >= 0, strictly increasing, < horizon for i >= 1
    std::function<PortfolioRule(int)> rule_at;   // rule on (t_i, t_{i+1}]

    int trades_before(double t) const;
};

struct SelfFinancingCheck {
    bool self_financing = false;
    double max_residual = 0.0;
};

/// Terminal dividend of an evaluated portfolio: bond + risky * g(x_T).
double dividend(const Portfolio& pf, double x_T, const economy::MarketModel& model);

/// Funding check at every rebalance time: the incoming and outgoing holding
/// rules must have equal value old*S(t_i) = new*S(t_i) at the midpoint
/// representative of every cell of the refinement of the two partitions.
/// Prices are asset_price at the representative levels.
SelfFinancingCheck is_self_financing(const SimpleStrategy& strategy,
                                     const economy::MarketModel& model, double tol = 1e-9);

/// Gains sum_i h_i(B(t_i)) . (S(t_{i+1}) - S(t_i)) along one path. The path
/// grid must contain every trade time.
double gains_process(const SimpleStrategy& strategy, std::span<const double> path_times,
                     std::span<const double> path_values, const economy::MarketModel& model);

/// Rebalance injections along one path: (theta_i - theta_{i-1}) . S(t_i)
/// evaluated at the path's levels. Zero for strategies that are
/// self-financing along paths; the telescoping identity
///   div theta(T) = theta_0 . S(0) + gains + sum(injections)
/// holds for every strategy as an arithmetic fact.
std::vector<double> rebalance_injections(const SimpleStrategy& strategy,
                                         std::span<const double> path_times,
                                         std::span<const double> path_values,
                                         const economy::MarketModel& model);

/// Line-oriented text serialization; parse(to_text(s)) reproduces s
/// bit-exactly.
std::string to_text(const SimpleStrategy& strategy);
SimpleStrategy parse_strategy(const std::string& text);

}  // namespace hedgegap::strategies
