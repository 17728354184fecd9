#include <algorithm>
#include <cmath>

#include "hedgegap/certification.hpp"
#include "hedgegap/roots.hpp"

namespace hedgegap::certification {

using economy::MarketModel;
using mathkit::NormalLaw;

Lemma1Result lemma1_verify(const MarketModel& model, double epsilon,
                           std::span<const double> x0_grid, std::span<const double> t_grid) {
    if (!(epsilon > 0.0)) throw std::domain_error("lemma1_verify: epsilon must be > 0");
    const double T = model.horizon;
    std::vector<double> ts(t_grid.begin(), t_grid.end());
    std::sort(ts.begin(), ts.end());
    Lemma1Result res;

    auto deviation_at = [&](double t) {
        if (t >= T) return 0.0;
        double dev = 0.0;
        for (double x0 : x0_grid) {
            const double fx = mathkit::conditional_expectation(
                [&](double x) { return model.endowment(x); }, t, x0, T, model.quadrature);
            dev = std::max(dev, std::fabs(fx - model.endowment(x0)));
        }
        return dev;
    };

    std::vector<double> devs(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        devs[i] = deviation_at(ts[i]);
        res.deviation_by_t.emplace_back(ts[i], devs[i]);
    }
    // witness: the largest grid time still failing; every later grid time
    // must be below epsilon
    std::size_t last_fail = ts.size();
    for (std::size_t i = 0; i < ts.size(); ++i)
        if (devs[i] >= epsilon) last_fail = i;
    if (last_fail == ts.size()) {
        res.t_witness = ts.front();
        res.found = ts.size() > 1;
    } else {
        res.t_witness = ts[last_fail];
        res.found = last_fail + 1 < ts.size();
    }
    for (std::size_t i = 0; i < ts.size(); ++i)
        if (ts[i] > res.t_witness)
            res.sup_deviation_beyond_witness = std::max(res.sup_deviation_beyond_witness, devs[i]);

    // conditional-on-{B(t) <= x0} variant, on the increasing branch x0 <= 0
    // (the averaged value is then dominated by f(x0) + eps; right of the
    // peak the set {B(t) <= x0} contains the peak and the bound fails).
    // Probed on a thinned subset: each point costs a nested tail
    // integration.
    const std::size_t stride = std::max<std::size_t>(1, x0_grid.size() / 16);
    for (double t : ts) {
        if (!(t > res.t_witness) || t >= T) continue;
        auto value_fn = [&](double x1) {
            return mathkit::conditional_expectation(
                [&](double x) { return model.endowment(x); }, t, x1, T, model.quadrature);
        };
        for (std::size_t i = 0; i < x0_grid.size(); i += stride) {
            const double x0 = x0_grid[i];
            if (x0 > 0.0) continue;
            const double mean = mathkit::conditional_tail_mean(
                value_fn, NormalLaw(0.0, t), x0, mathkit::TailSide::below, model.quadrature);
            res.sup_deviation_le_variant =
                std::max(res.sup_deviation_le_variant, mean - model.endowment(x0));
        }
    }
    return res;
}

namespace {
double invert_increasing(const economy::FunctionSpec& g, double level, double hint) {
    double lo = hint, hi = hint;
    while (g(lo) >= level && lo > -1e6) lo = lo * 2.0 - 1.0;
    while (g(hi) <= level && hi < 1e6) hi = hi * 2.0 + 1.0;
    return g.invert_on(level, lo, hi);
}
}  // namespace

Lemma2Result lemma2_verify(const MarketModel& model, std::span<const double> c_grid,
                           std::span<const double> t_grid) {
    if (!model.asset1.convex())
        throw std::domain_error("lemma2_verify: requires the convex payoff family "
                                "(Jensen direction fails otherwise)");
    Lemma2Result res;
    for (double t : t_grid) {
        if (!(t > 0.0 && t < model.horizon))
            throw std::domain_error("lemma2_verify: t grid must lie in (0, T)");
        auto price_fn = [&](double x1) {
            return mathkit::conditional_expectation(
                [&](double x) { return model.asset1(x); }, t, x1, model.horizon,
                model.quadrature);
        };
        for (double c : c_grid) {
            const double m = invert_increasing(model.asset1, c, 0.0);
            const double value = mathkit::conditional_tail_mean(
                price_fn, NormalLaw(0.0, t), m, mathkit::TailSide::above, model.quadrature);
            const double slack = value - c;
            res.min_slack = std::min(res.min_slack, slack);
            res.slack_by_ct.emplace_back(c, t, slack);
        }
    }
    return res;
}

Lemma3Result lemma3_verify(const MarketModel& model, double epsilon,
                           std::span<const double> t_grid) {
    if (!(epsilon > 0.0)) throw std::domain_error("lemma3_verify: epsilon must be > 0");
    if (!model.asset1.convex())
        throw std::domain_error("lemma3_verify: requires the unbounded increasing payoff family");
    const double T = model.horizon;
    double t_min = T;
    for (double t : t_grid) t_min = std::min(t_min, t);
    if (!(t_min > 0.0 && t_min < T))
        throw std::domain_error("lemma3_verify: t grid must lie in (0, T)");

    const auto& g = model.asset1;
    Lemma3Result res;
    // the constructive witness: g(m) < eps/2, then shift left by the tail
    // cut M so that both conditional values stay below eps on [t_min, T)
    const double m = invert_increasing(g, 0.499 * epsilon, 0.0);
    // M1: density domination phi_{0,sqrt(T-t)}(x) <= phi_{0,sqrt(T)}(x) for
    // x >= M1, every t in the grid
    const double s2 = T - t_min;
    const double M1 = std::sqrt(std::log(T / s2) * s2 * T / (T - s2));
    // M2: tail integral of g against N(0,T) below eps/2
    auto tail_mass = [&](double M) {
        return mathkit::integrate_density([&](double x) { return g(x); }, NormalLaw(0.0, T), M,
                                          std::max(M, T) + 14.0 * std::sqrt(T),
                                          model.quadrature) -
               0.499 * epsilon;
    };
    double M2 = 0.0;
    if (tail_mass(0.0) > 0.0) {
        double hi = std::sqrt(T);
        while (tail_mass(hi) > 0.0 && hi < 1e3) hi *= 2.0;
        M2 = mathkit::brent_root(tail_mass, 0.0, hi, 1e-10);
    }
    const double M = std::max(M1, M2);
    res.tail_cut = M;
    res.c_witness = g(m - M);

    const double mc = m - M;
    for (double t : t_grid) {
        if (!(t > 0.0 && t < T)) throw std::domain_error("lemma3_verify: t grid must lie in (0, T)");
        const double eq_value = mathkit::conditional_expectation(
            [&](double x) { return g(x); }, t, mc, T, model.quadrature);
        auto price_fn = [&](double x1) {
            return mathkit::conditional_expectation([&](double x) { return g(x); }, t, x1, T,
                                                    model.quadrature);
        };
        const double le_value = mathkit::conditional_tail_mean(
            price_fn, NormalLaw(0.0, t), mc, mathkit::TailSide::below, model.quadrature);
        res.max_eq_value = std::max(res.max_eq_value, eq_value);
        res.max_le_value = std::max(res.max_le_value, le_value);
    }
    return res;
}

}  // namespace hedgegap::certification
