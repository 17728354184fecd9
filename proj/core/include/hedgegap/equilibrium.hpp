#pragma once

#include <functional>
#include <string>

#include "hedgegap/market.hpp"

namespace hedgegap::economy {

/// The unique Walrasian equilibrium of the two-consumer economy. With no
/// aggregate risk both consumers smooth perfectly, so consumer 1 eats the
/// constant a at both dates and consumer 2 eats 4 - a.
struct Equilibrium {
    double a = 0.0;
    double gamma = 0.0;
    double foc_residual = 0.0;
    double margin_below_two = 0.0;  // 2 - a, reported for auditability
    std::string state_price_normalization;

    // consumptions ((a,a), (4-a,4-a))
    double consumption1() const { return a; }
    double consumption2() const { return 4.0 - a; }
};

/// gamma = E[f(B(T))]. Throws ModelError if the result is not < 2 (the
/// construction requires it).
double gamma(const MarketModel& model);

/// a = (1+gamma)/2 from budget balance with equal date-0/date-T state
/// prices; verifies the first-order condition for the configured felicity
/// to 1e-9 and market clearing by construction.
Equilibrium solve_equilibrium(const MarketModel& model);

/// z(x) = a - f(x): consumer 1's Walrasian net trade as a function of the
/// terminal Brownian level.
std::function<double(double)> walras_net_trade(const MarketModel& model, const Equilibrium& eq);

/// Risk-neutral price of asset j at time t given B(t) = x0 (Q = P here):
/// the conditional expectation of the payoff. Asset 0 always prices to 1;
/// at t = T the price is the payoff itself. Requires 0 <= t <= T.
double asset_price(const MarketModel& model, int asset_index, double t, double x0);

}  // namespace hedgegap::economy
