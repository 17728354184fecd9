#include "hedgegap/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "hedgegap/report.hpp"

namespace hedgegap::strategies {

std::size_t PortfolioRule::cell_index(double x) const {
    return static_cast<std::size_t>(
        std::upper_bound(breakpoints.begin(), breakpoints.end(), x) - breakpoints.begin());
}

std::pair<double, double> PortfolioRule::cell_bounds(std::size_t cell) const {
    const double lo = (cell == 0) ? -std::numeric_limits<double>::infinity() : breakpoints[cell - 1];
    const double hi = (cell == breakpoints.size()) ? std::numeric_limits<double>::infinity()
                                                   : breakpoints[cell];
    return {lo, hi};
}

void PortfolioRule::validate() const {
    if (coeffs.size() != breakpoints.size() + 1)
        throw std::domain_error("PortfolioRule: cells must be breakpoints + 1");
    for (std::size_t i = 1; i < breakpoints.size(); ++i)
        if (!(breakpoints[i] > breakpoints[i - 1]))
            throw std::domain_error("PortfolioRule: overlapping cells (breakpoints not increasing)");
    for (const auto& pf : coeffs)
        if (!std::isfinite(pf[0]) || !std::isfinite(pf[1]))
            throw std::domain_error("PortfolioRule: holdings must be finite");
}

void SimpleStrategy::validate() const {
    if (trade_times.size() < 2 || trade_times.front() != 0.0)
        throw std::domain_error("SimpleStrategy: trade times must start at 0 and end at T");
    for (std::size_t i = 1; i < trade_times.size(); ++i)
        if (!(trade_times[i] > trade_times[i - 1]))
            throw std::domain_error("SimpleStrategy: trade times must be strictly increasing");
    if (holdings.size() + 1 != trade_times.size())
        throw std::domain_error("SimpleStrategy: need one holding rule per interval");
    for (const auto& rule : holdings) rule.validate();
}

int AlmostSimpleStrategy::trades_before(double t) const {
    int n = 0;
    while (time_at(n) < t && n < 1'000'000) ++n;
    return n;
}

double dividend(const Portfolio& pf, double x_T, const economy::MarketModel& model) {
    return pf[0] + pf[1] * model.asset1(x_T);
}

namespace {
// midpoint representative of a finite or half-infinite cell; rebalances are
// funded and checked at the same per-cell level
double cell_representative(double lo, double hi, double span) {
    if (std::isinf(lo) && std::isinf(hi)) return 0.0;
    if (std::isinf(lo)) return hi - 0.5 * span;
    if (std::isinf(hi)) return lo + 0.5 * span;
    return 0.5 * (lo + hi);
}
}  // namespace

SelfFinancingCheck is_self_financing(const SimpleStrategy& strategy,
                                     const economy::MarketModel& model, double tol) {
    strategy.validate();
    const double span = model.quadrature.truncation_width * std::sqrt(model.horizon);
    SelfFinancingCheck check;
    for (std::size_t i = 1; i < strategy.holdings.size(); ++i) {
        const double t = strategy.trade_times[i];
        const auto& incoming = strategy.holdings[i - 1];
        const auto& outgoing = strategy.holdings[i];
        // refinement of the two partitions
        std::vector<double> cuts;
        cuts.insert(cuts.end(), incoming.breakpoints.begin(), incoming.breakpoints.end());
        cuts.insert(cuts.end(), outgoing.breakpoints.begin(), outgoing.breakpoints.end());
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        std::vector<double> los{-std::numeric_limits<double>::infinity()};
        los.insert(los.end(), cuts.begin(), cuts.end());
        for (std::size_t c = 0; c < los.size(); ++c) {
            const double lo = los[c];
            const double hi = (c + 1 < los.size()) ? los[c + 1]
                                                   : std::numeric_limits<double>::infinity();
            const double x = cell_representative(lo, hi, span);
            const double s1 = economy::asset_price(model, 1, t, x);
            const Portfolio in = incoming.at(x), out = outgoing.at(x);
            const double residual = std::fabs((out[0] - in[0]) + (out[1] - in[1]) * s1);
            check.max_residual = std::max(check.max_residual, residual);
        }
    }
    check.self_financing = check.max_residual <= tol;
    return check;
}

namespace {
std::vector<std::size_t> locate_trade_times(const SimpleStrategy& strategy,
                                            std::span<const double> path_times) {
    std::vector<std::size_t> idx;
    idx.reserve(strategy.trade_times.size());
    for (double t : strategy.trade_times) {
        const auto it = std::lower_bound(path_times.begin(), path_times.end(), t - 1e-12);
        if (it == path_times.end() || std::fabs(*it - t) > 1e-12)
            throw std::domain_error("gains_process: path grid is missing trade time " +
                                    format_double(t));
        idx.push_back(static_cast<std::size_t>(it - path_times.begin()));
    }
    return idx;
}

double price_at(const economy::MarketModel& model, double t, double x) {
    return economy::asset_price(model, 1, t, x);
}
}  // namespace

double gains_process(const SimpleStrategy& strategy, std::span<const double> path_times,
                     std::span<const double> path_values, const economy::MarketModel& model) {
    strategy.validate();
    if (path_times.size() != path_values.size())
        throw std::domain_error("gains_process: path times/values size mismatch");
    const auto idx = locate_trade_times(strategy, path_times);
    double gains = 0.0;
    for (std::size_t i = 0; i < strategy.holdings.size(); ++i) {
        const double t0 = strategy.trade_times[i], t1 = strategy.trade_times[i + 1];
        const double x0 = path_values[idx[i]], x1 = path_values[idx[i + 1]];
        const Portfolio h = strategy.holdings[i].at(x0);
        // bond price is identically 1, so only the risky leg moves
        gains += h[1] * (price_at(model, t1, x1) - price_at(model, t0, x0));
    }
    return gains;
}

std::vector<double> rebalance_injections(const SimpleStrategy& strategy,
                                         std::span<const double> path_times,
                                         std::span<const double> path_values,
                                         const economy::MarketModel& model) {
    strategy.validate();
    const auto idx = locate_trade_times(strategy, path_times);
    std::vector<double> injections;
    injections.reserve(strategy.holdings.size() - 1);
    for (std::size_t i = 1; i < strategy.holdings.size(); ++i) {
        const double t = strategy.trade_times[i];
        const double x_prev = path_values[idx[i - 1]];
        const double x_now = path_values[idx[i]];
        const Portfolio in = strategy.holdings[i - 1].at(x_prev);
        const Portfolio out = strategy.holdings[i].at(x_now);
        const double s1 = price_at(model, t, x_now);
        injections.push_back((out[0] - in[0]) + (out[1] - in[1]) * s1);
    }
    return injections;
}

std::string to_text(const SimpleStrategy& strategy) {
    std::ostringstream os;
    os << "simple_strategy_v1\n";
    os << "times " << strategy.trade_times.size();
    for (double t : strategy.trade_times) os << " " << format_double(t);
    os << "\n";
    for (std::size_t i = 0; i < strategy.holdings.size(); ++i) {
        const auto& rule = strategy.holdings[i];
        os << "interval " << i << " cells " << rule.cell_count() << "\n";
        if (!rule.breakpoints.empty()) {
            os << "breaks";
            for (double b : rule.breakpoints) os << " " << format_double(b);
            os << "\n";
        }
        for (const auto& pf : rule.coeffs)
            os << "coeff " << format_double(pf[0]) << " " << format_double(pf[1]) << "\n";
    }
    return os.str();
}

SimpleStrategy parse_strategy(const std::string& text) {
    std::istringstream is(text);
    std::string tok;
    if (!(is >> tok) || tok != "simple_strategy_v1")
        throw std::domain_error("parse_strategy: bad header");
    SimpleStrategy s;
    std::size_t n_times = 0;
    if (!(is >> tok >> n_times) || tok != "times" || n_times < 2)
        throw std::domain_error("parse_strategy: bad times line");
    s.trade_times.resize(n_times);
    for (auto& t : s.trade_times)
        if (!(is >> t)) throw std::domain_error("parse_strategy: truncated times");
    while (is >> tok) {
        if (tok != "interval") throw std::domain_error("parse_strategy: expected interval");
        std::size_t index = 0, cells = 0;
        if (!(is >> index >> tok >> cells) || tok != "cells" || cells == 0)
            throw std::domain_error("parse_strategy: bad interval header");
        PortfolioRule rule;
        if (cells > 1) {
            if (!(is >> tok) || tok != "breaks")
                throw std::domain_error("parse_strategy: expected breaks");
            rule.breakpoints.resize(cells - 1);
            for (auto& b : rule.breakpoints)
                if (!(is >> b)) throw std::domain_error("parse_strategy: truncated breaks");
        }
        rule.coeffs.resize(cells);
        for (auto& pf : rule.coeffs) {
            if (!(is >> tok) || tok != "coeff")
                throw std::domain_error("parse_strategy: expected coeff");
            if (!(is >> pf[0] >> pf[1]))
                throw std::domain_error("parse_strategy: truncated coeff");
        }
        if (index != s.holdings.size())
            throw std::domain_error("parse_strategy: intervals out of order");
        s.holdings.push_back(std::move(rule));
    }
    s.validate();
    return s;
}

}  // namespace hedgegap::strategies
