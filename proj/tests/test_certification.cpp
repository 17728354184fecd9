#include <doctest.h>

#include <cmath>
#include <random>

#include "hedgegap/certification.hpp"
#include "hedgegap/common.hpp"
#include "support.hpp"

using namespace hedgegap;
using namespace hedgegap::certification;

namespace {

const economy::MarketModel& model() {
    static const economy::MarketModel m = economy::default_market();
    return m;
}
const economy::MarketModel& model_exp() {
    static const economy::MarketModel m = economy::default_market_exponential();
    return m;
}
const economy::Equilibrium& eq() {
    static const economy::Equilibrium e = economy::solve_equilibrium(model());
    return e;
}

// closed forms for the default bump under N(0,T)
double e_f(double T) { return 1.0 + 2.5 * 0.4 / std::sqrt(0.16 + T); }
double e_f_sq(double T) {
    const double m1 = 0.4 / std::sqrt(0.16 + T);
    const double m2 = (0.4 / std::sqrt(2.0)) / std::sqrt(0.08 + T);
    return 1.0 + 5.0 * m1 + 6.25 * m2;
}

PartitionCandidate single_cell(double t_star, double a0, double a1) {
    PartitionCandidate c;
    c.t_star = t_star;
    c.coeffs = {{a0, a1}};
    return c;
}

}  // namespace

TEST_CASE("example1 constants reproduce the derived values") {
    const auto rep = example1_constants(model(), eq(), 0.5);
    // hand algebra: lambda2 = w sqrt(2 ln(2.5/(a + 1.5 - 1)))
    const double level = eq().a + 1.5;
    const double lambda_oracle = 0.4 * std::sqrt(2.0 * std::log(2.5 / (level - 1.0)));
    CHECK(rep.lambda2 == doctest::Approx(lambda_oracle).epsilon(1e-10));
    CHECK(rep.lambda1 == doctest::Approx(-lambda_oracle).epsilon(1e-10));  // f is even
    CHECK(rep.lambda2 == doctest::Approx(0.2778).epsilon(4e-3));

    // P(F) oracle: Simpson integration of the standard pdf over [l1, l2]
    const double pf_oracle = testsupport::simpson(
        [](double x) { return mathkit::normal_pdf(x); }, rep.lambda1, rep.lambda2, 4000);
    CHECK(rep.prob_F == doctest::Approx(pf_oracle).epsilon(1e-10));
    CHECK(std::fabs(rep.prob_F - 0.21885) < 1e-4);
    CHECK(std::fabs(rep.epsilon_star - 0.10943) < 1e-4);
    CHECK(rep.epsilon_star == doctest::Approx(0.5 * rep.prob_F));
}

TEST_CASE("example1 constants: shrinking F and the admissible interval") {
    const double cap = mu_upper_bound(model(), eq(), false);
    CHECK(cap == doctest::Approx(3.5 - eq().a - 1.0).epsilon(1e-12));
    const auto near_cap = example1_constants(model(), eq(), 0.999 * cap);
    CHECK(near_cap.prob_F < 0.01);
    CHECK(near_cap.epsilon_star < 0.01);
    CHECK_THROWS_AS(example1_constants(model(), eq(), cap * 1.001), std::domain_error);
    CHECK_THROWS_AS(example1_constants(model(), eq(), 0.0), std::domain_error);
    CHECK_THROWS_AS(example1_constants(model(), eq(), -0.1), std::domain_error);
}

TEST_CASE("mu sweep exposes a bound-maximizing mu") {
    const auto rows = mu_sweep(model(), eq(), 32);
    REQUIRE(rows.size() == 32);
    double best = 0.0;
    for (const auto& r : rows) {
        CHECK(r.epsilon_star == doctest::Approx(r.mu * r.prob_F));
        best = std::max(best, r.epsilon_star);
    }
    // interior maximum: endpoints are worse than the best row
    CHECK(best > rows.front().epsilon_star);
    CHECK(best > rows.back().epsilon_star);
}

TEST_CASE("theorem1 conditions on hand-checkable candidates") {
    const double T = 1.0;
    // zero coefficients: condition (a) from the endowment alone, distance ||z||
    const auto zero = theorem1_conditions(single_cell(0.5, 0.0, 0.0), model(), eq(), 1e-3);
    CHECK(zero.holds_a);
    const double z_norm_sq = eq().a * eq().a - 2.0 * eq().a * e_f(T) + e_f_sq(T);
    CHECK(zero.distance == doctest::Approx(std::sqrt(z_norm_sq)).epsilon(1e-8));
    const auto mc = testsupport::mc_mean(
        [&](double x) {
            const double z = eq().a - model().endowment(x);
            return z * z;
        },
        mathkit::NormalLaw(0.0, T), 400000, 9090);
    CHECK(std::fabs(zero.distance * zero.distance - mc.mean) <= 4.0 * mc.se);
    CHECK(!zero.holds_b);

    // bond-only candidate at a - 1: distance^2 = E[(1-f)^2]
    const auto bond = theorem1_conditions(single_cell(0.5, eq().a - 1.0, 0.0), model(), eq(), 10.0);
    CHECK(bond.holds_a);
    const double d_sq = e_f_sq(T) - 2.0 * e_f(T) + 1.0;
    CHECK(bond.distance == doctest::Approx(std::sqrt(d_sq)).epsilon(1e-8));
    CHECK(bond.holds_b);

    // violating the forced bound fails (a) through the left tail
    const auto bad = theorem1_conditions(single_cell(0.5, -1.2, 0.1), model(), eq(), 1e-3);
    CHECK(!bad.holds_a);
    CHECK(bad.min_limit_residual == doctest::Approx(-0.2).epsilon(1e-12));
    CHECK(bad.min_interior < -0.19);  // tail probe at -w sqrt(T): f ~ 1, g ~ 0
}

TEST_CASE("forced bounds residuals") {
    const auto none = forced_bounds_check(single_cell(0.5, 0.0, 0.0), model());
    REQUIRE(none.residuals.size() == 1);
    CHECK(none.residuals[0] == doctest::Approx(1.0));
    CHECK(none.min_one_plus_psi == doctest::Approx(1.0).epsilon(1e-9));

    const auto boundary = forced_bounds_check(single_cell(0.5, -1.0, 1.0), model());
    CHECK(boundary.residuals[0] == doctest::Approx(0.0).epsilon(1e-14));

    const auto bad = forced_bounds_check(single_cell(0.5, -1.2, 0.1), model());
    CHECK(bad.residuals[0] == doctest::Approx(-0.2).epsilon(1e-12));

    CHECK_THROWS_AS(forced_bounds_check(single_cell(0.5, 0.0, 0.0), model_exp()),
                    std::domain_error);
}

TEST_CASE("soundness coupling: negative residual implies condition (a) fails") {
    const auto problem = terminal_problem(model(), eq(), 0.5);
    std::mt19937_64 eng(404);
    int negatives = 0;
    for (int rep = 0; rep < 400; ++rep) {
        PartitionCandidate c;
        c.t_star = 0.1 + 0.85 * testsupport::uniform01(eng);
        const int cells = 1 + static_cast<int>(4.0 * testsupport::uniform01(eng));
        for (int b = 1; b < cells; ++b)
            c.boundaries.push_back(-2.0 + 4.0 * b / cells +
                                   0.3 * (testsupport::uniform01(eng) - 0.5));
        std::sort(c.boundaries.begin(), c.boundaries.end());
        for (int k = 0; k < cells; ++k)
            c.coeffs.push_back({6.0 * testsupport::uniform01(eng) - 3.0,
                                6.0 * testsupport::uniform01(eng) - 3.0});
        const auto fb = forced_bounds_check(c, model());
        double min_res = 1e300;
        for (double r : fb.residuals) min_res = std::min(min_res, r);
        if (min_res < 0.0) {
            ++negatives;
            const auto prob = terminal_problem(model(), eq(), c.t_star);
            const auto a = check_condition_a(prob, c.coeffs, c.boundaries);
            CHECK(!a.holds);
        }
    }
    CHECK(negatives > 50);  // the sampler exercises the implication

    // hair-width negative residuals are still caught: the tail part of (a)
    // carries no tolerance
    const auto hairline = single_cell(0.5, -1.0 - 1e-12, 0.5);
    const auto fb = forced_bounds_check(hairline, model());
    CHECK(fb.residuals[0] < 0.0);
    const auto res = theorem1_conditions(hairline, model(), eq(), 1e-3);
    CHECK(!res.holds_a);
}

TEST_CASE("single-cell search matches a dense grid oracle and respects the gap") {
    SearchParams sp;
    sp.t_star = 0.5;
    sp.max_cells = 1;
    sp.budget = 2000;
    sp.seed = 1;
    const auto result = search_best_feasible(model(), eq(), sp);

    // dense-grid oracle over the feasible box
    const TwoTimeEvaluator eval(terminal_problem(model(), eq(), sp.t_star));
    const double inf = std::numeric_limits<double>::infinity();
    const auto m = eval.cell_moments(-inf, inf);
    double oracle = inf;
    for (double a0 = -1.0; a0 <= 3.0; a0 += 0.01) {
        for (double a1 = std::max(-1.0 - a0, -3.0); a1 <= 3.0; a1 += 0.01) {
            oracle = std::min(oracle, cell_objective(m, {a0, a1}));
        }
    }
    CHECK(result.distance <= std::sqrt(oracle) + 1e-6);
    CHECK(result.distance >= std::sqrt(oracle) - 2e-2);  // grid resolution slack

    const double cap = mu_upper_bound(model(), eq(), false);
    for (double frac : {0.2, 0.4, 0.6, 0.8}) {
        const auto rep = example1_constants(model(), eq(), frac * cap);
        CHECK(result.distance >= rep.epsilon_star - 1e-6);
    }
    // the engine-path distance agrees with the direct-quadrature recheck
    CHECK(result.distance == doctest::Approx(result.distance_verified).epsilon(1e-7));
}

TEST_CASE("search is deterministic given the seed") {
    SearchParams sp;
    sp.t_star = 0.9;
    sp.max_cells = 4;
    sp.budget = 4000;
    sp.seed = 3;
    const auto a = search_best_feasible(model(), eq(), sp);
    const auto b = search_best_feasible(model(), eq(), sp);
    CHECK(a.distance == b.distance);
    CHECK(a.best.boundaries == b.best.boundaries);
    CHECK(a.evals_used == b.evals_used);
}

TEST_CASE("feasible search stays above the certificate, unconstrained search does not") {
    const auto constants = example1_constants(model(), eq(), 0.5);

    SearchParams feasible;
    feasible.t_star = 0.999;
    feasible.max_cells = 16;
    feasible.budget = 30000;
    feasible.seed = 5;
    const auto fr = search_best_feasible(model(), eq(), feasible);
    CHECK(fr.distance >= constants.epsilon_star - 1e-6);
    for (const auto& entry : fr.log) CHECK(entry.distance >= constants.epsilon_star - 1e-6);

    SearchParams diag = feasible;
    diag.enforce_feasibility = false;
    diag.max_cells = 32;
    diag.budget = 50000;
    const auto dr = search_best_feasible(model(), eq(), diag);
    CHECK(dr.distance < 0.5 * constants.epsilon_star);
    CHECK(dr.distance < fr.distance);
}

TEST_CASE("lemma1: witness exists and deviations shrink toward the horizon") {
    std::vector<double> x0;
    for (double x = -6.0; x <= 6.0 + 1e-12; x += 0.1) x0.push_back(x);
    std::vector<double> ts;
    for (int k = 1; k <= 12; ++k) ts.push_back(1.0 - std::pow(2.0, -k));
    const auto res = lemma1_verify(model(), 0.05, x0, ts);
    CHECK(res.found);
    CHECK(res.t_witness < 1.0);
    CHECK(res.sup_deviation_beyond_witness < 0.05);
    // deviation is non-increasing as t rises on the tested grid
    for (std::size_t i = 1; i < res.deviation_by_t.size(); ++i)
        CHECK(res.deviation_by_t[i].second <= res.deviation_by_t[i - 1].second + 1e-12);
    // the increasing-branch conditional variant stays controlled as well
    CHECK(res.sup_deviation_le_variant < 0.05);

    // constant endowment: zero deviation at every t
    auto flat = model();
    flat.endowment = economy::FunctionSpec::constant(2.0);
    const auto flat_res = lemma1_verify(flat, 0.01, x0, ts);
    CHECK(flat_res.sup_deviation_beyond_witness == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("lemma2: conditional expectation dominates the threshold") {
    const std::vector<double> cs = {0.1, 0.5, 1.0, 2.0, 5.0};
    const std::vector<double> ts = {0.1, 0.5, 0.9};
    const auto res = lemma2_verify(model_exp(), cs, ts);
    CHECK(res.min_slack >= -1e-9);

    // truncated lognormal oracle: E[e^{B_T} | B_t >= m] with m = ln c
    for (const auto& [c, t, slack] : res.slack_by_ct) {
        const double m = std::log(c);
        const double oracle = std::exp(0.5) *
                              mathkit::normal_tail((m - t) / std::sqrt(t)) /
                              mathkit::normal_tail(m / std::sqrt(t));
        CHECK(slack == doctest::Approx(oracle - c).epsilon(1e-6));
    }
    // small c: the slack is dominated by the unconditional mean
    CHECK(std::get<2>(res.slack_by_ct.front()) > 0.5);

    CHECK_THROWS_AS(lemma2_verify(model(), cs, ts), std::domain_error);
}

TEST_CASE("lemma3: constructive witness controls both conditional values") {
    const std::vector<double> ts = {0.1, 0.3, 0.5, 0.7, 0.9};
    for (double eps : {0.1, 0.05}) {
        const auto res = lemma3_verify(model_exp(), eps, ts);
        CHECK(res.c_witness > 0.0);
        CHECK(res.c_witness < 0.5 * eps);  // the shifted witness sits far below eps/2
        CHECK(res.max_eq_value < eps);
        CHECK(res.max_le_value < eps);
        // closed form for the conditional-on-equality value: c e^{(T-t)/2},
        // maximal at the smallest t
        const double closed = res.c_witness * std::exp(0.5 * (1.0 - ts.front()));
        CHECK(res.max_eq_value == doctest::Approx(closed).epsilon(1e-6));
    }
    CHECK_THROWS_AS(lemma3_verify(model(), 0.05, ts), std::domain_error);
}

TEST_CASE("example2 certificate confirms the conditional gap") {
    const auto eqe = economy::solve_equilibrium(model_exp());
    Example2Params params;
    params.mu = 0.5;
    params.cells = {1, 4};
    params.seeds = 2;
    params.budget = 20000;
    const auto run = example2_certificate(model_exp(), eqe, params);
    const auto& rep = run.report;

    CHECK(rep.eps == doctest::Approx(0.125 * rep.prob_F_T).epsilon(1e-12));
    CHECK(std::fabs(rep.eps - 0.02736) < 2e-4);
    CHECK(rep.prob_F_tstar > 0.5 * rep.prob_F_T);
    CHECK(rep.prob_F_tstar > 0.1094);
    CHECK(rep.t_witness < rep.t_star);
    CHECK(rep.t_star < 1.0);
    CHECK(rep.t_partition < rep.t_star);
    CHECK(rep.bound_printed ==
          doctest::Approx((rep.mu - 2.0 * rep.eps) * rep.prob_F_tstar).epsilon(1e-12));
    CHECK(rep.bound_squared_variant < rep.bound_printed);

    CHECK(rep.verdict == Verdict::gap_confirmed);
    CHECK(rep.min_conditional_distance_sq >= rep.bound_printed - 1e-6);
    CHECK(rep.min_conditional_distance_sq >= rep.bound_squared_variant - 1e-6);
    for (double r : rep.forced_bound_residuals) CHECK(r >= -1e-12);
    for (const auto& search : run.searches)
        for (const auto& entry : search.log)
            CHECK(entry.distance * entry.distance >= rep.bound_printed - 1e-6);

    CHECK_THROWS_AS(example2_certificate(model_exp(), eqe,
                                         [] {
                                             Example2Params p;
                                             p.mu = 2.0;
                                             return p;
                                         }()),
                    std::domain_error);
    CHECK_THROWS_AS(example2_certificate(model(), eq(), params), std::domain_error);
}

TEST_CASE("conditional forced bounds fail for sign-violating candidates") {
    // instantiates the conditional bounds: a1 < 0 fails for large levels,
    // a0 < -1 - eps fails for small levels
    const auto eqe = economy::solve_equilibrium(model_exp());
    const auto problem = conditional_problem(model_exp(), eqe, 0.45, 0.9);
    const std::array<double, 2> neg_risky{0.0, -0.2};
    const std::array<double, 2> deep_bond{-1.4, 0.1};
    const std::vector<std::array<double, 2>> cand1{neg_risky}, cand2{deep_bond};
    CHECK(!check_condition_a(problem, cand1, std::vector<double>{}).holds);
    CHECK(!check_condition_a(problem, cand2, std::vector<double>{}).holds);
    const std::vector<std::array<double, 2>> good{{0.0, 0.5}};
    CHECK(check_condition_a(problem, good, std::vector<double>{}).holds);
}

TEST_CASE("table-accelerated moments agree with direct nested quadrature") {
    std::mt19937_64 eng(88);
    for (double t_star : {0.3, 0.9, 0.999}) {
        const auto problem = terminal_problem(model(), eq(), t_star);
        const TwoTimeEvaluator direct(problem);
        const MomentTable table(problem);
        for (int rep = 0; rep < 12; ++rep) {
            const double width = 0.05 + 2.0 * testsupport::uniform01(eng);
            const double lo = -3.0 + 5.0 * testsupport::uniform01(eng);
            const auto a = direct.cell_moments(lo, lo + width);
            const auto b = table.cell_moments(lo, lo + width);
            CHECK(a.mass == doctest::Approx(b.mass).epsilon(1e-12));
            CHECK(a.u1 == doctest::Approx(b.u1).epsilon(1e-8).scale(1.0));
            CHECK(a.uu == doctest::Approx(b.uu).epsilon(1e-8).scale(1.0));
            CHECK(a.tgt == doctest::Approx(b.tgt).epsilon(1e-8).scale(1.0));
            CHECK(a.tgt_u == doctest::Approx(b.tgt_u).epsilon(1e-8).scale(1.0));
            CHECK(a.tgt_sq == doctest::Approx(b.tgt_sq).epsilon(1e-8).scale(1.0));
        }
    }
}

TEST_CASE("candidate validation") {
    PartitionCandidate c;
    c.t_star = 0.5;
    c.boundaries = {1.0, 0.5};
    c.coeffs = {{0, 0}, {0, 0}, {0, 0}};
    CHECK_THROWS_AS(c.validate(), std::domain_error);
    c.boundaries = {0.5, 1.0};
    c.coeffs = {{0, 0}};
    CHECK_THROWS_AS(c.validate(), std::domain_error);
}
