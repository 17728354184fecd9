#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hedgegap/hedging.hpp"
#include "support.hpp"

using namespace hedgegap;
using namespace hedgegap::approximation;

namespace {

const economy::MarketModel& model() {
    static const economy::MarketModel m = economy::default_market();
    return m;
}
const economy::Equilibrium& eq() {
    static const economy::Equilibrium e = economy::solve_equilibrium(model());
    return e;
}

mathkit::PathEnsemble ensemble_for(std::span<const int> ns, int paths, std::uint64_t seed,
                                   Scheme scheme = Scheme::uniform) {
    std::vector<double> grid;
    for (int n : ns)
        for (double t : rebalance_schedule(1.0, n, scheme)) grid.push_back(t);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
               grid.end());
    return mathkit::generate_paths(1.0, grid, paths, seed);
}

}  // namespace

TEST_CASE("rebalance schedules") {
    const auto u = rebalance_schedule(1.0, 4, Scheme::uniform);
    CHECK(u == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    const auto g = rebalance_schedule(1.0, 4, Scheme::geometric_near_T);
    CHECK(g[1] == doctest::Approx(0.5));
    CHECK(g[2] == doctest::Approx(0.75));
    CHECK(g[3] == doctest::Approx(0.875));
    CHECK(g.back() == 1.0);
    CHECK(rebalance_schedule(1.0, 1, Scheme::uniform) == std::vector<double>{0.0, 1.0});
    CHECK_THROWS_AS(rebalance_schedule(1.0, 0, Scheme::uniform), std::domain_error);
}

TEST_CASE("hedge plan: initial capital and value function boundary") {
    const auto plan = build_hedge(model(), eq(), 4, Scheme::uniform);
    // martingale start: V(0,0) = E[z]
    const double ez = mathkit::expect_terminal(
        [&](double x) { return eq().a - model().endowment(x); },
        mathkit::NormalLaw(0.0, 1.0), model().quadrature);
    CHECK(std::fabs(plan.initial_capital() - ez) <= 1e-8);
    // close to the horizon the value function approaches z itself
    const auto tight = build_hedge(model(), eq(), 256, Scheme::uniform);
    const int last = tight.rebalance_count() - 1;
    for (double x : {-1.0, 0.0, 0.7})
        CHECK(tight.value_at(last, x) ==
              doctest::Approx(eq().a - model().endowment(x)).epsilon(5e-2));
}

TEST_CASE("spanned targets replicate exactly for every N") {
    // constant target: a constant endowment makes z itself constant
    auto flat = model();
    flat.endowment = economy::FunctionSpec::constant(1.2);
    const auto eq_flat = economy::solve_equilibrium(flat);
    const std::vector<int> ns = {1, 4};
    const auto ens = ensemble_for(ns, 2000, 12);
    const auto table = measure_convergence(flat, eq_flat, ns, ens);
    for (const auto& row : table.rows) {
        CHECK(row.l2_error <= 1e-10);
        CHECK(row.viol_prob == 0.0);
        CHECK(row.self_financing_residual <= 1e-12);
    }

    // risky-payoff target: with the endowment equal to the payoff and a = 0,
    // z = -g is spanned by one unit short of the asset
    auto spanned = model();
    spanned.endowment = economy::FunctionSpec::logistic(1.0);
    economy::Equilibrium eq_span;
    eq_span.a = 0.0;
    eq_span.gamma = 0.5;
    const auto table2 = measure_convergence(spanned, eq_span, ns, ens);
    for (const auto& row : table2.rows) CHECK(row.l2_error <= 1e-9);
}

TEST_CASE("convergence table on the default model") {
    const std::vector<int> ns = {1, 4, 16, 64};
    const auto ens = ensemble_for(ns, 20000, 777);
    const auto table = measure_convergence(model(), eq(), ns, ens);
    REQUIRE(table.rows.size() == 4);

    // strictly decreasing l2 error
    for (std::size_t i = 1; i < table.rows.size(); ++i)
        CHECK(table.rows[i].l2_error < table.rows[i - 1].l2_error);

    // N = 1: the static hedge; for the symmetric default model the
    // capital-constrained projection onto span{1, A1} is the bond-only
    // portfolio, so the error is the standard deviation of z
    const auto& quad = model().quadrature;
    const mathkit::NormalLaw lawT(0.0, 1.0);
    auto f = [&](double x) { return model().endowment(x); };
    auto g = [&](double x) { return model().asset1(x); };
    const double Ef = mathkit::expect_terminal(f, lawT, quad);
    const double Eff = mathkit::expect_terminal([&](double x) { return f(x) * f(x); }, lawT, quad);
    const double Eg = mathkit::expect_terminal(g, lawT, quad);
    const double Egg = mathkit::expect_terminal([&](double x) { return g(x) * g(x); }, lawT, quad);
    const double Efg = mathkit::expect_terminal([&](double x) { return f(x) * g(x); }, lawT, quad);
    const double s10 = economy::asset_price(model(), 1, 0.0, 0.0);
    const double v0 = eq().a - Ef;
    // minimize E[(z - v0 - c1 (g - S10))^2] over c1 (2x2 normal equations
    // collapse to one dimension under the capital constraint)
    const double var_g = Egg - 2.0 * s10 * Eg + s10 * s10;
    const double cov = -(Efg - Ef * s10) + 0.0 * var_g;  // E[(z - v0)(g - S10)] with z = a - f
    const double c1 = cov / var_g;
    const double err_sq = [&] {
        // E[(z - v0 - c1(g - S10))^2]
        const double Ez = eq().a - Ef;
        const double Ezz = eq().a * eq().a - 2.0 * eq().a * Ef + Eff;
        const double Ezg = eq().a * Eg - Efg;
        return Ezz - 2.0 * v0 * Ez + v0 * v0 - 2.0 * c1 * (Ezg - s10 * Ez - v0 * Eg + v0 * s10) +
               c1 * c1 * var_g;
    }();
    CHECK(std::fabs(c1) < 1e-9);  // symmetry kills the covariance
    CHECK(table.rows[0].l2_error == doctest::Approx(std::sqrt(err_sq)).epsilon(0.02));

    // the violation columns: none for the static bond-only hedge, some for
    // moderate N, and the self-financing identity holds along every path
    CHECK(table.rows[0].viol_prob == 0.0);
    CHECK(table.rows[1].viol_prob > 0.0);
    CHECK(table.rows.back().viol_prob >= 0.5 * table.rows.front().viol_prob);
    for (const auto& row : table.rows) {
        CHECK(row.self_financing_residual <= 1e-9);
        if (row.viol_prob > 0.0) CHECK(row.mean_viol > 0.0);
        CHECK(row.worst_viol <= eq().a + 1e-9);
    }

    // monotone information on a doubling pair, fixed seed
    const std::vector<int> pair = {8, 16};
    const auto ens2 = ensemble_for(pair, 20000, 777);
    const auto t2 = measure_convergence(model(), eq(), pair, ens2);
    CHECK(t2.rows[1].l2_error <= t2.rows[0].l2_error + 0.02);
    const double ratio = (t2.rows[1].l2_error * t2.rows[1].l2_error) /
                         (t2.rows[0].l2_error * t2.rows[0].l2_error);
    CHECK(ratio > 0.125);
    CHECK(ratio < 1.0);
}

TEST_CASE("csv serialization of the convergence table") {
    ConvergenceTable table;
    table.rows.push_back({4, 0.5, 0.01, -1.25, 0.3, 1e-14});
    std::ostringstream os;
    table.to_csv(os);
    CHECK(os.str() == "N,l2_error,viol_prob,worst_viol,mean_viol\n4,0.5,0.01,-1.25,0.3\n");
}

TEST_CASE("grid mismatch is a domain error") {
    const std::vector<int> ns = {3};
    const auto ens = ensemble_for(std::vector<int>{4}, 10, 5);
    CHECK_THROWS_AS(measure_convergence(model(), eq(), ns, ens), std::domain_error);
}

TEST_CASE("strategy views: funded rules pass the funding check, sampled rules do not") {
    const auto plan = build_hedge(model(), eq(), 16, Scheme::uniform);

    const auto funded = plan.funded_strategy(64);
    funded.validate();
    const auto funded_check = strategies::is_self_financing(funded, model(), 1e-9);
    CHECK(funded_check.self_financing);
    CHECK(funded_check.max_residual <= 1e-9);

    const auto sampled = plan.sampled_strategy(64);
    const auto sampled_check = strategies::is_self_financing(sampled, model(), 1e-9);
    CHECK(!sampled_check.self_financing);
    CHECK(sampled_check.max_residual > 1e-4);  // the value resets need funding at O(dt)

    // serialization of a big machine-built strategy still round-trips
    const std::string text = strategies::to_text(funded);
    CHECK(strategies::to_text(strategies::parse_strategy(text)) == text);
}

TEST_CASE("geometric scheme packs rebalances toward the horizon") {
    const std::vector<int> ns = {8};
    const auto ens = ensemble_for(ns, 4000, 99, Scheme::geometric_near_T);
    const auto table = measure_convergence(model(), eq(), ns, ens, Scheme::geometric_near_T);
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0].l2_error < 0.9);
    CHECK(table.rows[0].self_financing_residual <= 1e-9);
}

TEST_CASE("truncation of almost-simple strategies") {
    const double T = 1.0;
    strategies::AlmostSimpleStrategy almost;
    almost.horizon = T;
    almost.time_at = [T](int i) { return T * (1.0 - std::pow(2.0, -i)); };
    almost.rule_at = [](int i) {
        return strategies::PortfolioRule::constant({1.0 - std::pow(2.0, -i), 0.5});
    };

    CHECK(almost.trades_before(0.9) == 4);  // 0, 1/2, 3/4, 7/8 < 0.9

    const auto k10 = truncate_almost_simple(almost, 10);
    CHECK(k10.trade_times[k10.trade_times.size() - 2] ==
          doctest::Approx(T * (1.0 - std::pow(2.0, -9))));
    CHECK(k10.trade_times.back() == T);
    CHECK(k10.holdings.size() == 10);

    const auto k1 = truncate_almost_simple(almost, 1);
    CHECK(k1.trade_times == std::vector<double>{0.0, T});
    CHECK(k1.holdings.size() == 1);
    CHECK(k1.holdings[0].coeffs[0][0] == doctest::Approx(0.0));

    // finite schedule: k beyond the end returns the whole strategy
    strategies::AlmostSimpleStrategy finite;
    finite.horizon = T;
    finite.time_at = [T](int i) { return i < 3 ? 0.3 * i : T; };
    finite.rule_at = [](int) { return strategies::PortfolioRule::constant({1.0, 0.0}); };
    const auto whole = truncate_almost_simple(finite, 10);
    CHECK(whole.holdings.size() == 3);
    CHECK_THROWS_AS(truncate_almost_simple(almost, 0), std::domain_error);
}

TEST_CASE("truncated dividends converge in L2 as the truncation index grows") {
    // rules taken from the funded hedge on the geometric schedule; tail
    // holdings are uniformly bounded, so truncations settle down
    const int k_max = 11;
    const auto plan = build_hedge(model(), eq(), k_max, Scheme::geometric_near_T);
    const auto reference = plan.funded_strategy(48);

    strategies::AlmostSimpleStrategy almost;
    almost.horizon = 1.0;
    almost.time_at = [&](int i) { return reference.trade_times[std::min<std::size_t>(
        static_cast<std::size_t>(i), reference.trade_times.size() - 2)]; };
    almost.rule_at = [&](int i) { return reference.holdings[std::min<std::size_t>(
        static_cast<std::size_t>(i), reference.holdings.size() - 1)]; };

    const auto ens = ensemble_for(std::vector<int>{k_max}, 2000, 31, Scheme::geometric_near_T);
    auto dividend_l2_diff = [&](const strategies::SimpleStrategy& a,
                                const strategies::SimpleStrategy& b) {
        double acc = 0.0;
        for (const auto& path : ens.values) {
            auto final_holding = [&](const strategies::SimpleStrategy& s) {
                const double t_last = s.trade_times[s.trade_times.size() - 2];
                const auto it = std::lower_bound(ens.times.begin(), ens.times.end(),
                                                 t_last - 1e-12);
                const double x1 = path[static_cast<std::size_t>(it - ens.times.begin())];
                return s.holdings.back().at(x1);
            };
            const double da = strategies::dividend(final_holding(a), path.back(), model());
            const double db = strategies::dividend(final_holding(b), path.back(), model());
            acc += (da - db) * (da - db);
        }
        return std::sqrt(acc / static_cast<double>(ens.values.size()));
    };

    // monitored, not assumed: early truncations may wander, the tail must
    // settle toward the full strategy
    const auto full = truncate_almost_simple(almost, k_max);
    std::vector<double> diffs;
    for (int k : {4, 6, 8, 10}) diffs.push_back(dividend_l2_diff(truncate_almost_simple(almost, k), full));
    for (std::size_t i = 1; i < diffs.size(); ++i) CHECK(diffs[i] < diffs[i - 1]);
    CHECK(diffs.back() < 0.5 * diffs.front());
}
