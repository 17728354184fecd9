#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hedgegap/feasibility.hpp"
#include "hedgegap/paths.hpp"
#include "hedgegap/strategy.hpp"

namespace hedgegap::approximation {

enum class Scheme { uniform, geometric_near_T };
std::string to_string(Scheme s);

/// Rebalance times 0 = t_0 < ... < t_N = T. The geometric scheme packs the
/// trades toward the horizon: t_i = T (1 - 2^-i).
std::vector<double> rebalance_schedule(double T, int N, Scheme scheme);

/// Discretization of the continuous replicating strategy for the Walrasian
/// net trade: the value function V(t,x) = E[z | B(t)=x], the risky delta
/// dV/dx / dS1/dx (central differences, clamped where the price slope
/// vanishes), and the initial capital V(0,0), all sampled on a (t, x) grid.
///
/// Two strategy views are exposed:
///  - sampled_strategy(): holdings equal the continuous strategy's at each
///    rebalance (risky = delta, bond = V - delta S1). This is the naive
///    discretization; its rebalances require injections, which
///    is_self_financing reports at the O(dt) scale.
///  - funded_strategy(): same risky rules, bond rules composed so that each
///    rebalance is exactly funded at the per-cell representative level;
///    passes is_self_financing at round-off.
/// Performance statistics (measure_convergence) follow the funded account
/// along each path, which is self-financing by construction and whose
/// dividends converge to z.
class HedgePlan {
  public:
    HedgePlan(const economy::MarketModel& model, const economy::Equilibrium& eq, int N,
              Scheme scheme);

    const std::vector<double>& times() const { return times_; }
    double initial_capital() const { return capital_; }
    int rebalance_count() const { return static_cast<int>(times_.size()) - 1; }
    Scheme scheme() const { return scheme_; }

    double value_at(int i, double x) const;   // V(t_i, x)
    double delta_at(int i, double x) const;
    double price_at(int i, double x) const;   // S1(t_i, x)

    strategies::SimpleStrategy sampled_strategy(int cells = 128) const;
    strategies::SimpleStrategy funded_strategy(int cells = 128) const;

  private:
    const economy::MarketModel* model_;
    Scheme scheme_;
    std::vector<double> times_;
    double x_lo_ = 0.0, dx_ = 0.0;
    std::vector<std::vector<double>> value_, delta_, price_;
    double capital_ = 0.0;

    std::vector<double> view_breakpoints(int cells) const;
};

HedgePlan build_hedge(const economy::MarketModel& model, const economy::Equilibrium& eq, int N,
                      Scheme scheme = Scheme::uniform);

struct ConvergenceRow {
    int n = 0;
    double l2_error = 0.0;
    double viol_prob = 0.0;
    double worst_viol = 0.0;
    double mean_viol = 0.0;              // mean violation magnitude over violating paths
    double self_financing_residual = 0;  // max |div - capital - gains| over paths
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    /// Fixed header: N,l2_error,viol_prob,worst_viol,mean_viol
    void to_csv(std::ostream& out) const;
};

/// Funded-account backtest of the hedge over the ensemble for each N:
/// L2 distance of the achieved dividend to z, violation statistics of
/// div + e1, and the self-financing identity residual. The ensemble grid
/// must contain every rebalance time of every N.
ConvergenceTable measure_convergence(const economy::MarketModel& model,
                                     const economy::Equilibrium& eq, std::span<const int> Ns,
                                     const mathkit::PathEnsemble& ensemble,
                                     Scheme scheme = Scheme::uniform);

/// Keeps the first k trade times and holds the k-th portfolio to the
/// horizon. k past the end of a finite schedule returns the whole strategy.
strategies::SimpleStrategy truncate_almost_simple(const strategies::AlmostSimpleStrategy& strategy,
                                                  int k);

}  // namespace hedgegap::approximation
