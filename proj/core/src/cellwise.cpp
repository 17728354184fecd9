#include "hedgegap/cellwise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace hedgegap::certification {

using mathkit::NormalLaw;

double TwoTimeProblem::terminal_sigma() const {
    const double v1 = degenerate_first ? 0.0 : law1.variance;
    return std::sqrt(v1 + increment_variance);
}

TwoTimeProblem terminal_problem(const economy::MarketModel& model,
                                const economy::Equilibrium& eq, double t_partition) {
    if (!(t_partition >= 0.0 && t_partition < model.horizon))
        throw std::domain_error("terminal_problem: partition time must lie in [0, T)");
    TwoTimeProblem p;
    p.degenerate_first = (t_partition == 0.0);
    if (!p.degenerate_first) p.law1 = NormalLaw(0.0, t_partition);
    p.increment_variance = model.horizon - t_partition;
    const economy::FunctionSpec g = model.asset1;
    const economy::FunctionSpec f = model.endowment;
    const double a = eq.a;
    p.risky = [g](double x) { return g(x); };
    p.endow = [f](double x) { return f(x); };
    p.target = [f, a](double x) { return a - f(x); };
    p.risky_lim_neg = g.limit_neg();
    p.risky_lim_pos = g.limit_pos();
    p.endow_lim_neg = f.limit_neg();
    p.endow_lim_pos = f.limit_pos();
    p.quad = model.quadrature;
    return p;
}

TwoTimeProblem conditional_problem(const economy::MarketModel& model,
                                   const economy::Equilibrium& eq, double t_partition,
                                   double t_star) {
    if (!(t_partition > 0.0 && t_partition < t_star && t_star < model.horizon))
        throw std::domain_error("conditional_problem: need 0 < t_partition < t_star < T");
    TwoTimeProblem p;
    p.law1 = NormalLaw(0.0, t_partition);
    p.increment_variance = t_star - t_partition;
    p.quad = model.quadrature;

    // Tabulate the time-t_star price G and endowment value F on splines wide
    // enough for every x2 the evaluator can reach.
    const double w = model.quadrature.truncation_width;
    const double reach = w * (std::sqrt(t_partition) + std::sqrt(t_star - t_partition)) + 2.0;
    const int n = 8193;
    const double dx = 2.0 * reach / (n - 1);
    std::vector<double> gv(n), fv(n);
    const NormalLaw inc(0.0, model.horizon - t_star);
    const auto& rule = mathkit::gauss_hermite(model.quadrature.node_count);
    const double scale = inc.sigma() * 1.4142135623730951;
    for (int i = 0; i < n; ++i) {
        const double x = -reach + i * dx;
        double sg = 0.0, sf = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            const double u = x + scale * rule.nodes[k];
            sg += rule.weights[k] * model.asset1(u);
            sf += rule.weights[k] * model.endowment(u);
        }
        gv[i] = sg * 0.5641895835477563;
        fv[i] = sf * 0.5641895835477563;
    }
    auto G = std::make_shared<mathkit::UniformCubicSpline>(-reach, dx, std::move(gv));
    auto F = std::make_shared<mathkit::UniformCubicSpline>(-reach, dx, std::move(fv));
    const double a = eq.a;
    p.risky = [G](double x) { return (*G)(x); };
    p.endow = [F](double x) { return (*F)(x); };
    p.target = [F, a](double x) { return a - (*F)(x); };
    // conditional expectations inherit the payoff limits
    p.risky_lim_neg = model.asset1.limit_neg();
    p.risky_lim_pos = model.asset1.limit_pos();
    p.endow_lim_neg = model.endowment.limit_neg();
    p.endow_lim_pos = model.endowment.limit_pos();
    return p;
}

double cell_objective(const CellMoments& m, const std::array<double, 2>& a) {
    return m.tgt_sq + a[0] * a[0] * m.mass + 2.0 * a[0] * a[1] * m.u1 + a[1] * a[1] * m.uu -
           2.0 * a[0] * m.tgt - 2.0 * a[1] * m.tgt_u;
}

namespace {

struct InnerMoments {
    double u1, uu, tgt, tgt_u, tgt_sq;
};

// conditional moments at a fixed level x1, against N(x1, increment_variance)
InnerMoments inner_at(const TwoTimeProblem& p, double x1, int nodes) {
    const auto& rule = mathkit::gauss_hermite(nodes);
    const double scale = std::sqrt(p.increment_variance) * 1.4142135623730951;
    InnerMoments m{0, 0, 0, 0, 0};
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double x2 = x1 + scale * rule.nodes[k];
        const double w = rule.weights[k];
        const double r = p.risky(x2);
        const double t = p.target(x2);
        m.u1 += w * r;
        m.uu += w * r * r;
        m.tgt += w * t;
        m.tgt_u += w * t * r;
        m.tgt_sq += w * t * t;
    }
    const double inv_sqrt_pi = 0.5641895835477563;
    m.u1 *= inv_sqrt_pi;
    m.uu *= inv_sqrt_pi;
    m.tgt *= inv_sqrt_pi;
    m.tgt_u *= inv_sqrt_pi;
    m.tgt_sq *= inv_sqrt_pi;
    return m;
}

}  // namespace

TwoTimeEvaluator::TwoTimeEvaluator(TwoTimeProblem problem) : problem_(std::move(problem)) {}

CellMoments TwoTimeEvaluator::cell_moments(double lo, double hi) const {
    CellMoments out;
    if (!(lo < hi)) return out;
    if (problem_.degenerate_first) {
        // cells follow the [lo, hi) convention of PortfolioRule::cell_index
        if (lo <= 0.0 && 0.0 < hi) {
            const InnerMoments m = inner_at(problem_, 0.0, problem_.quad.node_count);
            out.mass = 1.0;
            out.u1 = m.u1;
            out.uu = m.uu;
            out.tgt = m.tgt;
            out.tgt_u = m.tgt_u;
            out.tgt_sq = m.tgt_sq;
        }
        return out;
    }
    const NormalLaw& law = problem_.law1;
    out.mass = mathkit::normal_cdf(hi, law) - mathkit::normal_cdf(lo, law);
    const double sigma = law.sigma();
    const double clip_lo = std::max(lo, law.mean - problem_.quad.truncation_width * sigma);
    const double clip_hi = std::min(hi, law.mean + problem_.quad.truncation_width * sigma);
    if (!(clip_lo < clip_hi)) return out;
    const double panel = sigma / 4.0;
    const int n_panels = std::max(1, static_cast<int>(std::ceil((clip_hi - clip_lo) / panel)));
    for (int k = 0; k < n_panels; ++k) {
        const double A = clip_lo + (clip_hi - clip_lo) * k / n_panels;
        const double B = clip_lo + (clip_hi - clip_lo) * (k + 1) / n_panels;
        const double c = 0.5 * (A + B), hw = 0.5 * (B - A);
        for (int i = 0; i < 8; ++i) {
            for (double sgn : {1.0, -1.0}) {
                const double x = c + sgn * hw * mathkit::detail::kGL16X[i];
                const double wgt = hw * mathkit::detail::kGL16W[i] * mathkit::normal_pdf(x, law);
                const InnerMoments m = inner_at(problem_, x, problem_.quad.node_count);
                out.u1 += wgt * m.u1;
                out.uu += wgt * m.uu;
                out.tgt += wgt * m.tgt;
                out.tgt_u += wgt * m.tgt_u;
                out.tgt_sq += wgt * m.tgt_sq;
            }
        }
    }
    return out;
}

double TwoTimeEvaluator::target_sq_norm() const {
    const double v1 = problem_.degenerate_first ? 0.0 : problem_.law1.variance;
    auto sq = [&](double x) {
        const double t = problem_.target(x);
        return t * t;
    };
    return mathkit::expect_terminal(sq, NormalLaw(0.0, v1 + problem_.increment_variance),
                                    problem_.quad);
}

double TwoTimeEvaluator::distance_sq(std::span<const double> boundaries,
                                     std::span<const std::array<double, 2>> coeffs) const {
    if (coeffs.size() != boundaries.size() + 1)
        throw std::domain_error("distance_sq: cells must be boundaries + 1");
    const double inf = std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (std::size_t c = 0; c < coeffs.size(); ++c) {
        const double lo = (c == 0) ? -inf : boundaries[c - 1];
        const double hi = (c == boundaries.size()) ? inf : boundaries[c];
        acc += cell_objective(cell_moments(lo, hi), coeffs[c]);
    }
    return acc;
}

MomentTable::MomentTable(const TwoTimeProblem& problem, int grid_points) : problem_(problem) {
    if (problem.degenerate_first)
        throw std::domain_error("MomentTable: degenerate partition time not supported");
    const double sigma = problem.law1.sigma();
    const double w = problem.quad.truncation_width;
    x_lo_ = problem.law1.mean - (w + 0.5) * sigma;
    x_hi_ = problem.law1.mean + (w + 0.5) * sigma;
    const double dx = (x_hi_ - x_lo_) / (grid_points - 1);
    std::vector<double> vu(grid_points), vuu(grid_points), vt(grid_points), vtu(grid_points),
        vtt(grid_points);
    for (int i = 0; i < grid_points; ++i) {
        const InnerMoments m = inner_at(problem_, x_lo_ + i * dx, problem_.quad.node_count);
        vu[i] = m.u1;
        vuu[i] = m.uu;
        vt[i] = m.tgt;
        vtu[i] = m.tgt_u;
        vtt[i] = m.tgt_sq;
    }
    m_u_ = mathkit::UniformCubicSpline(x_lo_, dx, std::move(vu));
    m_uu_ = mathkit::UniformCubicSpline(x_lo_, dx, std::move(vuu));
    m_t_ = mathkit::UniformCubicSpline(x_lo_, dx, std::move(vt));
    m_tu_ = mathkit::UniformCubicSpline(x_lo_, dx, std::move(vtu));
    m_tt_ = mathkit::UniformCubicSpline(x_lo_, dx, std::move(vtt));
    target_sq_ = TwoTimeEvaluator(problem_).target_sq_norm();
}

CellMoments MomentTable::cell_moments(double lo, double hi) const {
    CellMoments out;
    if (!(lo < hi)) return out;
    const NormalLaw& law = problem_.law1;
    out.mass = mathkit::normal_cdf(hi, law) - mathkit::normal_cdf(lo, law);
    const double sigma = law.sigma();
    const double clip_lo = std::max(lo, law.mean - problem_.quad.truncation_width * sigma);
    const double clip_hi = std::min(hi, law.mean + problem_.quad.truncation_width * sigma);
    if (!(clip_lo < clip_hi)) return out;
    const double panel = sigma / 4.0;
    const int n_panels = std::max(1, static_cast<int>(std::ceil((clip_hi - clip_lo) / panel)));
    for (int k = 0; k < n_panels; ++k) {
        const double A = clip_lo + (clip_hi - clip_lo) * k / n_panels;
        const double B = clip_lo + (clip_hi - clip_lo) * (k + 1) / n_panels;
        const double c = 0.5 * (A + B), hw = 0.5 * (B - A);
        for (int i = 0; i < 8; ++i) {
            for (double sgn : {1.0, -1.0}) {
                const double x = c + sgn * hw * mathkit::detail::kGL16X[i];
                const double wgt = hw * mathkit::detail::kGL16W[i] * mathkit::normal_pdf(x, law);
                out.u1 += wgt * m_u_(x);
                out.uu += wgt * m_uu_(x);
                out.tgt += wgt * m_t_(x);
                out.tgt_u += wgt * m_tu_(x);
                out.tgt_sq += wgt * m_tt_(x);
            }
        }
    }
    return out;
}

std::vector<LinearConstraint> feasibility_constraints(const TwoTimeProblem& p) {
    std::vector<LinearConstraint> cs;
    // negative tail
    if (std::isfinite(p.risky_lim_neg)) {
        cs.push_back({p.endow_lim_neg, 1.0, p.risky_lim_neg});
    } else {
        throw std::domain_error("feasibility_constraints: risky payoff unbounded below");
    }
    // positive tail
    if (std::isfinite(p.risky_lim_pos)) {
        cs.push_back({p.endow_lim_pos, 1.0, p.risky_lim_pos});
    } else {
        cs.push_back({0.0, 0.0, 1.0});  // a1 >= 0
    }
    return cs;
}

double min_limit_residual(const TwoTimeProblem& problem,
                          std::span<const std::array<double, 2>> coeffs) {
    const auto cs = feasibility_constraints(problem);
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& a : coeffs)
        for (const auto& c : cs) worst = std::min(worst, c.residual(a));
    return worst;
}

double min_interior_value(const TwoTimeProblem& problem,
                          std::span<const std::array<double, 2>> coeffs,
                          std::span<const double> extra_points, int grid_points) {
    const double w = problem.quad.truncation_width;
    const double sigma2 = problem.terminal_sigma();
    std::vector<double> xs;
    xs.reserve(grid_points + extra_points.size());
    for (int i = 0; i < grid_points; ++i)
        xs.push_back(-w * sigma2 + 2.0 * w * sigma2 * i / (grid_points - 1));
    xs.insert(xs.end(), extra_points.begin(), extra_points.end());
    double worst = std::numeric_limits<double>::infinity();
    for (double x : xs) {
        const double r = problem.risky(x), e = problem.endow(x);
        for (const auto& a : coeffs) worst = std::min(worst, a[0] + a[1] * r + e);
    }
    return worst;
}

ConditionA check_condition_a(const TwoTimeProblem& problem,
                             std::span<const std::array<double, 2>> coeffs,
                             std::span<const double> extra_points) {
    ConditionA out;
    out.min_limit_residual = min_limit_residual(problem, coeffs);
    out.min_interior = min_interior_value(problem, coeffs, extra_points);
    // The tail part is exact arithmetic on the cell coefficients, so it gets
    // no tolerance; the interior part is smooth evaluation, 1e-9 covers
    // round-off.
    out.holds = out.min_limit_residual >= 0.0 && out.min_interior >= -1e-9;
    return out;
}

namespace {
bool feasible_point(const std::array<double, 2>& a,
                    const std::vector<LinearConstraint>& cs, double box, bool constrained) {
    const double tol = 1e-11;
    if (std::fabs(a[0]) > box + tol || std::fabs(a[1]) > box + tol) return false;
    if (!constrained) return true;
    for (const auto& c : cs)
        if (c.residual(a) < -tol) return false;
    return true;
}
}  // namespace

std::array<double, 2> solve_cell_qp(const CellMoments& m,
                                    const std::vector<LinearConstraint>& constraints,
                                    double box, bool constrained) {
    // minimize q(a) = a0^2 mass + 2 a0 a1 u1 + a1^2 uu - 2 a0 tgt - 2 a1 tgt_u
    if (m.mass <= 1e-300) return {0.0, 0.0};

    std::vector<std::array<double, 2>> candidates;
    const double det = m.mass * m.uu - m.u1 * m.u1;
    if (det > 1e-13 * std::max(m.mass * m.uu, 1e-300)) {
        candidates.push_back({(m.uu * m.tgt - m.u1 * m.tgt_u) / det,
                              (m.mass * m.tgt_u - m.u1 * m.tgt) / det});
    }
    // bond-only fit covers the degenerate quadratic (risky nearly constant on
    // the reachable range)
    candidates.push_back({m.tgt / m.mass, 0.0});

    // boundary lines: active constraints and box edges
    std::vector<LinearConstraint> lines = constrained ? constraints
                                                      : std::vector<LinearConstraint>{};
    lines.push_back({box, 1.0, 0.0});
    lines.push_back({box, -1.0, 0.0});
    lines.push_back({box, 0.0, 1.0});
    lines.push_back({box, 0.0, -1.0});
    for (const auto& line : lines) {
        // parameterize the line c0 + ca0 a0 + ca1 a1 = 0 as p + s*d
        const double n0 = line.ca0, n1 = line.ca1;
        const double nn = n0 * n0 + n1 * n1;
        if (nn <= 0.0) continue;
        const std::array<double, 2> p{-line.c0 * n0 / nn, -line.c0 * n1 / nn};
        const std::array<double, 2> d{-n1 / std::sqrt(nn), n0 / std::sqrt(nn)};
        // 1D quadratic in s
        const double qa = d[0] * d[0] * m.mass + 2.0 * d[0] * d[1] * m.u1 + d[1] * d[1] * m.uu;
        const double qb = p[0] * d[0] * m.mass + (p[0] * d[1] + p[1] * d[0]) * m.u1 +
                          p[1] * d[1] * m.uu - m.tgt * d[0] - m.tgt_u * d[1];
        if (qa > 1e-300) {
            const double s = -qb / qa;
            candidates.push_back({p[0] + s * d[0], p[1] + s * d[1]});
        }
        // pairwise intersections with the other lines
        for (const auto& other : lines) {
            const double det2 = line.ca0 * other.ca1 - line.ca1 * other.ca0;
            if (std::fabs(det2) < 1e-12) continue;
            candidates.push_back({(-line.c0 * other.ca1 + other.c0 * line.ca1) / det2,
                                  (-line.ca0 * other.c0 + other.ca0 * line.c0) / det2});
        }
    }

    std::array<double, 2> best{0.0, 0.0};
    double best_val = std::numeric_limits<double>::infinity();
    for (auto a : candidates) {
        // clamp into the box before the feasibility filter to keep interior
        // minimizers that poke just outside
        a[0] = std::clamp(a[0], -box, box);
        a[1] = std::clamp(a[1], -box, box);
        if (!feasible_point(a, constraints, box, constrained)) continue;
        const double v = cell_objective(m, a) - m.tgt_sq;
        if (v < best_val) {
            best_val = v;
            best = a;
        }
    }
    if (!std::isfinite(best_val)) {
        // fall back to the most conservative feasible corner
        best = {std::clamp(-1.0, -box, box), 0.0};
    }
    if (constrained) {
        // snap round-off-level violations onto the constraint lines so the
        // returned point is feasible exactly, not merely within the filter
        // tolerance
        for (int pass = 0; pass < 3; ++pass) {
            for (const auto& c : constraints) {
                const double res = c.residual(best);
                if (res < 0.0) {
                    const double nn = c.ca0 * c.ca0 + c.ca1 * c.ca1;
                    best[0] -= res * c.ca0 / nn;
                    best[1] -= res * c.ca1 / nn;
                }
            }
        }
    }
    return best;
}

}  // namespace hedgegap::certification
