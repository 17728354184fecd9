#include <algorithm>
#include <cmath>
#include <random>

#include "hedgegap/certification.hpp"

namespace hedgegap::certification {

namespace {

double next_uniform(std::mt19937_64& eng) {
    return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

struct CellState {
    CellMoments moments;
    std::array<double, 2> coeff{0.0, 0.0};
    double contribution = 0.0;
};

class SearchEngine {
  public:
    SearchEngine(const TwoTimeProblem& problem, const SearchParams& params)
        : problem_(problem),
          params_(params),
          table_(problem),
          constraints_(feasibility_constraints(problem)),
          x_lo_(-problem.quad.truncation_width * problem.law1.sigma()),
          x_hi_(problem.quad.truncation_width * problem.law1.sigma()) {}

    SearchResult run() {
        SearchResult result;
        std::mt19937_64 eng(params_.seed);
        int restart = 0;
        while (evals_ < params_.budget) {
            ++restart;
            init_boundaries(eng);
            refresh_all();
            double obj = total();
            for (int sweep = 0; sweep < 200 && evals_ < params_.budget; ++sweep) {
                sweep_boundaries();
                const double now = total();
                const bool converged = obj - now < 1e-13 * (1.0 + std::fabs(obj));
                obj = now;
                if (converged) break;
            }
            const double dist = std::sqrt(std::max(0.0, obj));
            result.log.push_back({restart, evals_, dist, params_.enforce_feasibility});
            if (dist < result.distance) {
                result.distance = dist;
                result.best.t_star = partition_time();
                result.best.boundaries = boundaries_;
                result.best.coeffs.clear();
                for (const auto& c : cells_) result.best.coeffs.push_back(c.coeff);
            }
            if (params_.max_cells <= 1 && restart >= 1) break;  // nothing left to move
        }
        result.evals_used = evals_;
        const TwoTimeEvaluator direct(problem_);
        result.distance_verified = std::sqrt(
            std::max(0.0, direct.distance_sq(result.best.boundaries, result.best.coeffs)));
        return result;
    }

  private:
    double partition_time() const {
        return problem_.law1.variance;  // level law variance equals the partition time
    }

    void init_boundaries(std::mt19937_64& eng) {
        const int L = params_.max_cells;
        boundaries_.clear();
        for (int k = 1; k < L; ++k) {
            double p = static_cast<double>(k) / L;
            p += (next_uniform(eng) - 0.5) * 0.6 / L;
            p = std::clamp(p, 1e-4, 1.0 - 1e-4);
            boundaries_.push_back(problem_.law1.mean +
                                  problem_.law1.sigma() * mathkit::normal_quantile(p));
        }
        std::sort(boundaries_.begin(), boundaries_.end());
        for (auto& b : boundaries_) b = std::clamp(b, x_lo_ + 1e-9, x_hi_ - 1e-9);
        cells_.assign(L, CellState{});
    }

    CellMoments moments(double lo, double hi) {
        ++evals_;
        return table_.cell_moments(lo, hi);
    }

    void refresh_cell(std::size_t c) {
        const double inf = std::numeric_limits<double>::infinity();
        const double lo = (c == 0) ? -inf : boundaries_[c - 1];
        const double hi = (c == boundaries_.size()) ? inf : boundaries_[c];
        cells_[c].moments = moments(lo, hi);
        cells_[c].coeff = solve_cell_qp(cells_[c].moments, constraints_, params_.coeff_bound,
                                        params_.enforce_feasibility);
        cells_[c].contribution = cell_objective(cells_[c].moments, cells_[c].coeff);
    }

    void refresh_all() {
        for (std::size_t c = 0; c < cells_.size(); ++c) refresh_cell(c);
    }

    double total() const {
        double acc = 0.0;
        for (const auto& c : cells_) acc += c.contribution;
        return acc;
    }

    // golden-section line search for one boundary; adjacent cells get exact
    // QP coefficients at every trial point
    void sweep_boundaries() {
        const double gr = 0.6180339887498949;
        for (std::size_t j = 0; j < boundaries_.size() && evals_ < params_.budget; ++j) {
            const double left = (j == 0) ? x_lo_ : boundaries_[j - 1];
            const double right = (j + 1 == boundaries_.size()) ? x_hi_ : boundaries_[j + 1];
            const double pad = 1e-7 * problem_.law1.sigma();
            double lo = left + pad, hi = right - pad;
            if (!(lo < hi)) continue;
            const double inf = std::numeric_limits<double>::infinity();
            const double cell_lo = (j == 0) ? -inf : boundaries_[j - 1];
            const double cell_hi = (j + 2 > boundaries_.size()) ? inf : boundaries_[j + 1];
            auto pair_value = [&](double b) {
                const CellMoments ml = moments(cell_lo, b);
                const CellMoments mr = moments(b, cell_hi);
                const auto al = solve_cell_qp(ml, constraints_, params_.coeff_bound,
                                              params_.enforce_feasibility);
                const auto ar = solve_cell_qp(mr, constraints_, params_.coeff_bound,
                                              params_.enforce_feasibility);
                return cell_objective(ml, al) + cell_objective(mr, ar);
            };
            double a = lo, b = hi;
            double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
            double f1 = pair_value(x1), f2 = pair_value(x2);
            const double current = cells_[j].contribution + cells_[j + 1].contribution;
            for (int it = 0; it < 28 && evals_ < params_.budget; ++it) {
                if (f1 < f2) {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - gr * (b - a);
                    f1 = pair_value(x1);
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + gr * (b - a);
                    f2 = pair_value(x2);
                }
            }
            const double best_b = (f1 < f2) ? x1 : x2;
            const double best_v = std::min(f1, f2);
            if (best_v < current - 1e-15) {
                boundaries_[j] = best_b;
                refresh_cell(j);
                refresh_cell(j + 1);
            }
        }
    }

    TwoTimeProblem problem_;
    SearchParams params_;
    MomentTable table_;
    std::vector<LinearConstraint> constraints_;
    double x_lo_, x_hi_;
    std::vector<double> boundaries_;
    std::vector<CellState> cells_;
    long evals_ = 0;
};

}  // namespace

SearchResult search_best_feasible(const economy::MarketModel& model,
                                  const economy::Equilibrium& eq, const SearchParams& params) {
    if (params.max_cells < 1)
        throw std::domain_error("search_best_feasible: max_cells must be >= 1");
    const auto problem = terminal_problem(model, eq, params.t_star);
    return SearchEngine(problem, params).run();
}

SearchResult search_best_feasible_conditional(const economy::MarketModel& model,
                                              const economy::Equilibrium& eq, double t_star,
                                              const SearchParams& params) {
    if (params.max_cells < 1)
        throw std::domain_error("search_best_feasible_conditional: max_cells must be >= 1");
    const auto problem = conditional_problem(model, eq, params.t_star, t_star);
    return SearchEngine(problem, params).run();
}

}  // namespace hedgegap::certification
