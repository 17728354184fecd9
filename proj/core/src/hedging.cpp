#include "hedgegap/hedging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "hedgegap/report.hpp"

namespace hedgegap::approximation {

using economy::Equilibrium;
using economy::MarketModel;
using mathkit::NormalLaw;

std::string to_string(Scheme s) {
    return s == Scheme::uniform ? "uniform" : "geometric_near_T";
}

std::vector<double> rebalance_schedule(double T, int N, Scheme scheme) {
    if (N < 1) throw std::domain_error("rebalance_schedule: N must be >= 1");
    std::vector<double> times;
    times.reserve(N + 1);
    times.push_back(0.0);
    if (scheme == Scheme::uniform) {
        for (int i = 1; i < N; ++i) times.push_back(T * i / N);
    } else {
        for (int i = 1; i < N; ++i) times.push_back(T * (1.0 - std::pow(2.0, -i)));
    }
    times.push_back(T);
    return times;
}

namespace {
constexpr int kGridPoints = 2049;
}

HedgePlan::HedgePlan(const MarketModel& model, const Equilibrium& eq, int N, Scheme scheme)
    : model_(&model), scheme_(scheme), times_(rebalance_schedule(model.horizon, N, scheme)) {
    const double T = model.horizon;
    const double w = model.quadrature.truncation_width;
    const double span = w * std::sqrt(T);
    x_lo_ = -span;
    dx_ = 2.0 * span / (kGridPoints - 1);
    const double fd_step = 1e-4 * std::sqrt(T);

    const auto& rule = mathkit::gauss_hermite(model.quadrature.node_count);
    const double a = eq.a;
    auto v_and_s = [&](double t, double x, double& V, double& S) {
        const double sigma = std::sqrt(T - t);
        const double scale = sigma * 1.4142135623730951;
        double sf = 0.0, sg = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            const double u = x + scale * rule.nodes[k];
            sf += rule.weights[k] * model.endowment(u);
            sg += rule.weights[k] * model.asset1(u);
        }
        V = a - sf * 0.5641895835477563;
        S = sg * 0.5641895835477563;
    };

    const int n_times = static_cast<int>(times_.size()) - 1;  // rebalance times only
    value_.assign(n_times, std::vector<double>(kGridPoints));
    price_.assign(n_times, std::vector<double>(kGridPoints));
    delta_.assign(n_times, std::vector<double>(kGridPoints));
    for (int i = 0; i < n_times; ++i) {
        const double t = times_[i];
        for (int j = 0; j < kGridPoints; ++j) {
            const double x = x_lo_ + j * dx_;
            double V, S, Vp, Sp, Vm, Sm;
            v_and_s(t, x, V, S);
            v_and_s(t, x + fd_step, Vp, Sp);
            v_and_s(t, x - fd_step, Vm, Sm);
            value_[i][j] = V;
            price_[i][j] = S;
            const double dS = (Sp - Sm) / (2.0 * fd_step);
            const double dV = (Vp - Vm) / (2.0 * fd_step);
            delta_[i][j] = (std::fabs(dS) < 1e-12) ? std::numeric_limits<double>::quiet_NaN()
                                                   : dV / dS;
        }
        // clamp delta where the price slope vanished (deep tails) to the
        // nearest interior value
        auto& d = delta_[i];
        for (int j = 0; j < kGridPoints; ++j) {
            if (!std::isnan(d[j])) continue;
            int l = j;
            while (l >= 0 && std::isnan(d[l])) --l;
            int r = j;
            while (r < kGridPoints && std::isnan(d[r])) ++r;
            if (l >= 0 && (r >= kGridPoints || j - l <= r - j)) {
                d[j] = d[l];
            } else if (r < kGridPoints) {
                d[j] = d[r];
            } else {
                d[j] = 0.0;
            }
        }
    }
    capital_ = value_at(0, 0.0);
}

namespace {
double interp_row(const std::vector<double>& row, double x_lo, double dx, double x) {
    const int n = static_cast<int>(row.size());
    const double t = (x - x_lo) / dx;
    if (t <= 0.0) return row.front();
    if (t >= n - 1) return row.back();
    const int i = static_cast<int>(t);
    const double u = t - i;
    return (1.0 - u) * row[i] + u * row[i + 1];
}
}  // namespace

double HedgePlan::value_at(int i, double x) const { return interp_row(value_[i], x_lo_, dx_, x); }
double HedgePlan::delta_at(int i, double x) const { return interp_row(delta_[i], x_lo_, dx_, x); }
double HedgePlan::price_at(int i, double x) const { return interp_row(price_[i], x_lo_, dx_, x); }

std::vector<double> HedgePlan::view_breakpoints(int cells) const {
    // interior breakpoints spanning the tabulated range
    std::vector<double> breaks;
    const double span = -x_lo_;
    for (int k = 1; k < cells; ++k) breaks.push_back(-span + 2.0 * span * k / cells);
    return breaks;
}

strategies::SimpleStrategy HedgePlan::sampled_strategy(int cells) const {
    strategies::SimpleStrategy s;
    s.trade_times = times_;
    const auto breaks = view_breakpoints(cells);
    const double span = -x_lo_;
    const int n_times = rebalance_count();
    for (int i = 0; i < n_times; ++i) {
        strategies::PortfolioRule rule;
        if (i == 0) {
            // B(0) = 0: the time-0 rule is a constant portfolio
            const double d = delta_at(0, 0.0);
            const double s1 = economy::asset_price(*model_, 1, 0.0, 0.0);
            rule = strategies::PortfolioRule::constant({capital_ - d * s1, d});
        } else {
            rule.breakpoints = breaks;
            for (std::size_t c = 0; c <= breaks.size(); ++c) {
                const double lo = (c == 0) ? -span - 2.0 * span / cells : breaks[c - 1];
                const double hi = (c == breaks.size()) ? span + 2.0 * span / cells : breaks[c];
                const double mid = 0.5 * (lo + hi);
                const double d = delta_at(i, mid);
                const double s1 = economy::asset_price(*model_, 1, times_[i], mid);
                const double v = value_at(i, mid);
                rule.coeffs.push_back({v - d * s1, d});
            }
        }
        s.holdings.push_back(std::move(rule));
    }
    return s;
}

strategies::SimpleStrategy HedgePlan::funded_strategy(int cells) const {
    strategies::SimpleStrategy s;
    s.trade_times = times_;
    const auto breaks = view_breakpoints(cells);
    const double span = -x_lo_;
    const int n_times = rebalance_count();

    const double d0 = delta_at(0, 0.0);
    const double s10 = economy::asset_price(*model_, 1, 0.0, 0.0);
    s.holdings.push_back(strategies::PortfolioRule::constant({capital_ - d0 * s10, d0}));

    for (int i = 1; i < n_times; ++i) {
        strategies::PortfolioRule rule;
        rule.breakpoints = breaks;
        const auto& prev = s.holdings.back();
        for (std::size_t c = 0; c <= breaks.size(); ++c) {
            const double lo = (c == 0) ? -span - 2.0 * span / cells : breaks[c - 1];
            const double hi = (c == breaks.size()) ? span + 2.0 * span / cells : breaks[c];
            const double mid = 0.5 * (lo + hi);
            const double d_new = delta_at(i, mid);
            const double s1 = economy::asset_price(*model_, 1, times_[i], mid);
            const auto in = prev.at(mid);
            // bond absorbs the delta change at the cell representative
            rule.coeffs.push_back({in[0] + (in[1] - d_new) * s1, d_new});
        }
        s.holdings.push_back(std::move(rule));
    }
    return s;
}

HedgePlan build_hedge(const MarketModel& model, const Equilibrium& eq, int N, Scheme scheme) {
    return HedgePlan(model, eq, N, scheme);
}

void ConvergenceTable::to_csv(std::ostream& out) const {
    out << "N,l2_error,viol_prob,worst_viol,mean_viol\n";
    for (const auto& r : rows) {
        out << r.n << "," << format_double(r.l2_error) << "," << format_double(r.viol_prob)
            << "," << format_double(r.worst_viol) << "," << format_double(r.mean_viol) << "\n";
    }
}

ConvergenceTable measure_convergence(const MarketModel& model, const Equilibrium& eq,
                                     std::span<const int> Ns,
                                     const mathkit::PathEnsemble& ensemble, Scheme scheme) {
    for (std::size_t i = 1; i < Ns.size(); ++i)
        if (!(Ns[i] > Ns[i - 1]))
            throw std::domain_error("measure_convergence: rebalance counts must be strictly increasing");
    ConvergenceTable table;
    const auto& times = ensemble.times;
    const auto& f = model.endowment;
    const auto& g = model.asset1;
    const double a = eq.a;

    for (int N : Ns) {
        const HedgePlan plan(model, eq, N, scheme);
        // locate rebalance times on the ensemble grid
        std::vector<std::size_t> idx;
        for (double t : plan.times()) {
            const auto it = std::lower_bound(times.begin(), times.end(), t - 1e-12);
            if (it == times.end() || std::fabs(*it - t) > 1e-12)
                throw std::domain_error(
                    "measure_convergence: ensemble grid does not refine the schedule for N = " +
                    std::to_string(N));
            idx.push_back(static_cast<std::size_t>(it - times.begin()));
        }

        ConvergenceRow row;
        row.n = N;
        row.worst_viol = std::numeric_limits<double>::infinity();
        double sq_sum = 0.0, viol_sum = 0.0;
        long violations = 0;
        for (const auto& path : ensemble.values) {
            double wealth = plan.initial_capital();
            double gains = 0.0;
            for (int i = 0; i < N; ++i) {
                const double x_i = path[idx[i]];
                const double d = plan.delta_at(i, x_i);
                const double s_now = plan.price_at(i, x_i);
                const double bond = wealth - d * s_now;
                const double s_next =
                    (i + 1 == N) ? g(path[idx[N]]) : plan.price_at(i + 1, path[idx[i + 1]]);
                wealth = bond + d * s_next;
                gains += d * (s_next - s_now);
            }
            const double x_T = path[idx[N]];
            const double err = wealth - (a - f(x_T));
            sq_sum += err * err;
            const double v = wealth + f(x_T);
            row.worst_viol = std::min(row.worst_viol, v);
            if (v < -1e-12) {
                ++violations;
                viol_sum += -v;
            }
            row.self_financing_residual =
                std::max(row.self_financing_residual,
                         std::fabs(wealth - plan.initial_capital() - gains));
        }
        const double n_paths = static_cast<double>(ensemble.path_count());
        row.l2_error = std::sqrt(sq_sum / n_paths);
        row.viol_prob = static_cast<double>(violations) / n_paths;
        row.mean_viol = violations > 0 ? viol_sum / static_cast<double>(violations) : 0.0;
        table.rows.push_back(row);
    }
    return table;
}

strategies::SimpleStrategy truncate_almost_simple(const strategies::AlmostSimpleStrategy& strategy,
                                                  int k) {
    if (k < 1) throw std::domain_error("truncate_almost_simple: k must be >= 1");
    const double T = strategy.horizon;
    strategies::SimpleStrategy s;
    if (strategy.time_at(0) != 0.0)
        throw std::domain_error("truncate_almost_simple: schedules must start at 0");
    for (int i = 0; i < k; ++i) {
        const double t = strategy.time_at(i);
        if (!(t < T * (1.0 - 1e-15)) && i > 0) break;  // finite schedule exhausted
        s.trade_times.push_back(t);
        s.holdings.push_back(strategy.rule_at(i));
    }
    s.trade_times.push_back(T);
    s.validate();
    return s;
}

}  // namespace hedgegap::approximation
