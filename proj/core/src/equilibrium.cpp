#include "hedgegap/equilibrium.hpp"

#include <cmath>
#include <stdexcept>

#include "hedgegap/common.hpp"
#include "hedgegap/report.hpp"

namespace hedgegap::economy {

double gamma(const MarketModel& model) {
    const double g = mathkit::expect_terminal([&](double x) { return model.endowment(x); },
                                              mathkit::NormalLaw(0.0, model.horizon),
                                              model.quadrature);
    if (!(g < 2.0))
        throw ModelError("model invalid: mean terminal endowment gamma = " + format_double(g) +
                         " must be < 2");
    return g;
}

Equilibrium solve_equilibrium(const MarketModel& model) {
    Equilibrium eq;
    eq.gamma = gamma(model);
    // Equal consumption across dates and states makes every state price equal
    // to the date-0 price, so consumer 1's budget reads 2a = e0 + gamma.
    eq.a = 0.5 * (1.0 + eq.gamma);
    eq.margin_below_two = 2.0 - eq.a;
    if (!(eq.a < 2.0))
        throw ModelError("equilibrium: a = " + format_double(eq.a) + " must be < 2");
    // first-order condition: u'(a)/u'(a0) == u'(4-a)/u'(4-a0) at a0 = a
    const double lhs = model.felicity.marginal(eq.a) / model.felicity.marginal(eq.a);
    const double rhs = model.felicity.marginal(4.0 - eq.a) / model.felicity.marginal(4.0 - eq.a);
    eq.foc_residual = std::fabs(lhs - rhs);
    if (eq.foc_residual > 1e-9)
        throw std::runtime_error("solve_equilibrium: first-order condition residual " +
                                 format_double(eq.foc_residual) + " exceeds 1e-9");
    eq.state_price_normalization =
        "date-0 and date-T state prices proportional to marginal utility at the constant "
        "consumption; equal consumption across dates makes the riskless discount 1";
    return eq;
}

std::function<double(double)> walras_net_trade(const MarketModel& model, const Equilibrium& eq) {
    const FunctionSpec f = model.endowment;
    const double a = eq.a;
    return [f, a](double x) { return a - f(x); };
}

double asset_price(const MarketModel& model, int asset_index, double t, double x0) {
    if (asset_index != 0 && asset_index != 1)
        throw std::domain_error("asset_price: asset index must be 0 or 1");
    if (!(t >= 0.0 && t <= model.horizon))
        throw std::domain_error("asset_price: t must lie in [0, T]");
    if (asset_index == 0) return 1.0;
    if (t == model.horizon) return model.asset1(x0);
    return mathkit::conditional_expectation([&](double x) { return model.asset1(x); }, t, x0,
                                            model.horizon, model.quadrature);
}

}  // namespace hedgegap::economy
