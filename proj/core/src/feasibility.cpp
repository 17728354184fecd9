#include "hedgegap/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "hedgegap/cellwise.hpp"
#include "hedgegap/roots.hpp"

namespace hedgegap::strategies {

namespace {

using certification::TwoTimeProblem;

// limit of c0 + c1*risky + endow at a tail, with infinity arithmetic
double tail_value(const Portfolio& pf, double risky_lim, double endow_lim) {
    if (std::isinf(risky_lim)) {
        if (pf[1] > 0.0) return std::numeric_limits<double>::infinity();
        if (pf[1] < 0.0) return -std::numeric_limits<double>::infinity();
        return pf[0] + endow_lim;
    }
    return pf[0] + pf[1] * risky_lim + endow_lim;
}

struct ViolatingIntervals {
    std::vector<std::pair<double, double>> parts;  // in terminal-level space
};

// sign scan + Brent refinement of v(x) = c0 + c1 g(x) + f(x) over the real
// line, tails handled through the family limits
ViolatingIntervals find_violations(const TwoTimeProblem& p, const Portfolio& pf,
                                   std::span<const double> probes) {
    const double w = p.quad.truncation_width;
    const double sigma2 = p.terminal_sigma();
    std::vector<double> xs;
    const int n = 2001;
    xs.reserve(n + probes.size());
    for (int i = 0; i < n; ++i)
        xs.push_back(-w * sigma2 + 2.0 * w * sigma2 * i / (n - 1));
    xs.insert(xs.end(), probes.begin(), probes.end());
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    auto v = [&](double x) { return pf[0] + pf[1] * p.risky(x) + p.endow(x); };
    const double inf = std::numeric_limits<double>::infinity();

    // Crossings outside the scan window carry at most the truncated tail
    // mass (< 1e-15 of probability), so window-edge violations extend to
    // +/-inf and tail-only violations get attached at the window edge.
    std::vector<std::pair<double, double>> parts;
    const bool neg_tail = tail_value(pf, p.risky_lim_neg, p.endow_lim_neg) < 0.0;
    const bool pos_tail = tail_value(pf, p.risky_lim_pos, p.endow_lim_pos) < 0.0;
    double prev_x = xs.front();
    double prev_v = v(prev_x);
    bool inside = prev_v < 0.0;
    double start = -inf;
    if (!inside && neg_tail) parts.emplace_back(-inf, prev_x);
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double x = xs[i];
        const double val = v(x);
        if ((prev_v < 0.0) != (val < 0.0)) {
            const double crossing = mathkit::brent_root(v, prev_x, x, 1e-12);
            if (inside) {
                parts.emplace_back(start, crossing);
                inside = false;
            } else {
                start = crossing;
                inside = true;
            }
        }
        prev_x = x;
        prev_v = val;
    }
    if (inside) {
        parts.emplace_back(start, inf);
    } else if (pos_tail) {
        parts.emplace_back(prev_x, inf);
    }
    return {std::move(parts)};
}

}  // namespace

FeasibilityReport terminal_feasibility(const SimpleStrategy& strategy,
                                       const economy::MarketModel& model,
                                       std::span<const double> levels) {
    strategy.validate();
    const auto eq = economy::solve_equilibrium(model);
    const double t1 = strategy.trade_times[strategy.trade_times.size() - 2];
    const auto problem = certification::terminal_problem(model, eq, t1);
    const auto& rule = strategy.holdings.back();

    FeasibilityReport report;
    report.worst_violation = std::numeric_limits<double>::infinity();

    // worst violation over the scan grid plus caller probes (per cell; the
    // value does not depend on the level at t1 within a cell)
    {
        const double w = problem.quad.truncation_width;
        const double sigma2 = problem.terminal_sigma();
        std::vector<double> xs(levels.begin(), levels.end());
        const int n = 2001;
        for (int i = 0; i < n; ++i)
            xs.push_back(-w * sigma2 + 2.0 * w * sigma2 * i / (n - 1));
        for (double x : xs) {
            const double r = problem.risky(x), e = problem.endow(x);
            for (const auto& pf : rule.coeffs)
                report.worst_violation = std::min(report.worst_violation, pf[0] + pf[1] * r + e);
        }
    }

    // violation probability: exact increment masses of the violating
    // terminal intervals, integrated over each cell of the final partition
    const mathkit::NormalLaw inc(0.0, problem.increment_variance);
    double prob = 0.0;
    for (std::size_t c = 0; c < rule.cell_count(); ++c) {
        const auto [lo, hi] = rule.cell_bounds(c);
        const auto viol = find_violations(problem, rule.coeffs[c], levels);
        if (viol.parts.empty()) continue;
        auto mass_given_x1 = [&](double x1) {
            double m = 0.0;
            for (const auto& [l, r] : viol.parts) {
                const double upper = std::isinf(r) ? 1.0 : mathkit::normal_cdf(r - x1, inc);
                const double lower = std::isinf(l) ? 0.0 : mathkit::normal_cdf(l - x1, inc);
                m += upper - lower;
            }
            return m;
        };
        if (problem.degenerate_first) {
            if (lo <= 0.0 && 0.0 < hi) prob += mass_given_x1(0.0);
            continue;
        }
        const double sigma1 = problem.law1.sigma();
        const double clip_lo = std::max(lo, -problem.quad.truncation_width * sigma1);
        const double clip_hi = std::min(hi, problem.quad.truncation_width * sigma1);
        if (!(clip_lo < clip_hi)) continue;
        prob += mathkit::integrate_density(mass_given_x1, problem.law1, clip_lo, clip_hi,
                                           problem.quad);
    }
    report.violation_probability = prob;

    const certification::TwoTimeEvaluator evaluator(problem);
    report.l2_distance_to_target =
        std::sqrt(std::max(0.0, evaluator.distance_sq(rule.breakpoints, rule.coeffs)));
    return report;
}

}  // namespace hedgegap::strategies
