#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "hedgegap/cellwise.hpp"
#include "hedgegap/report.hpp"

namespace hedgegap::certification {

/// A time t* in (0,T), a finite interval partition of Brownian levels at t*,
/// and per-cell coefficients (bond, risky): the object the necessary
/// conditions quantify over.
struct PartitionCandidate {
    double t_star = 0.5;
    std::vector<double> boundaries;                // interior boundaries, increasing
    std::vector<std::array<double, 2>> coeffs;     // boundaries + 1 cells
    void validate() const;
};

enum class Verdict { gap_confirmed, gap_violated, inconclusive };
std::string to_string(Verdict v);

struct CertificateReport {
    double mu = 0.0;
    double lambda1 = 0.0, lambda2 = 0.0;
    double prob_F = 0.0;
    double epsilon_star = 0.0;
    double best_feasible_distance = std::numeric_limits<double>::quiet_NaN();
    double diagnostic_distance = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> forced_bound_residuals;
    Verdict verdict = Verdict::inconclusive;

    // conditional-certificate extras (unbounded-asset scenario)
    double eps = std::numeric_limits<double>::quiet_NaN();           // (mu/4) P(F_T)
    double prob_F_T = std::numeric_limits<double>::quiet_NaN();
    double prob_F_tstar = std::numeric_limits<double>::quiet_NaN();
    double t_witness = std::numeric_limits<double>::quiet_NaN();     // t(eps)
    double t_star = std::numeric_limits<double>::quiet_NaN();
    double t_partition = std::numeric_limits<double>::quiet_NaN();   // t** of the candidates
    double bound_printed = std::numeric_limits<double>::quiet_NaN();      // (mu-2eps) P(F_t*)
    double bound_squared_variant = std::numeric_limits<double>::quiet_NaN();  // (mu-2eps)^2 P(F_t*)
    double min_conditional_distance_sq = std::numeric_limits<double>::quiet_NaN();
    double density_bound_K = 1.0;  // ||dQ/dP|| bound used in error budgets; Q = P here

    std::string notes;

    void to_key_values(KeyValueReport& kv, const std::string& prefix) const;
    void write_text(std::ostream& out) const;
};

/// Gap constants for the bounded-asset certificate: lambda1 < 0 < lambda2
/// solve f(lambda) = a + 1 + mu on the two monotone branches,
/// P(F) = Phi_T(lambda2) - Phi_T(lambda1) and epsilon* = mu P(F).
/// Requires 0 < mu < f(0) - a - 1.
CertificateReport example1_constants(const economy::MarketModel& model,
                                     const economy::Equilibrium& eq, double mu);

/// Admissible upper bound for mu (f(0) - a - 1, or (f(0)-a-1)/2 for the
/// conditional certificate).
double mu_upper_bound(const economy::MarketModel& model, const economy::Equilibrium& eq,
                      bool conditional);

struct MuSweepRow {
    double mu, prob_F, epsilon_star;
};
/// Sweeps mu over its admissible range and reports the bound-maximizing
/// value of mu P(F(mu)).
std::vector<MuSweepRow> mu_sweep(const economy::MarketModel& model,
                                 const economy::Equilibrium& eq, int points = 64);

struct Theorem1Result {
    bool holds_a = false;
    bool holds_b = false;
    double distance = 0.0;
    double min_interior = 0.0;
    double min_limit_residual = 0.0;
};

/// Necessary conditions: (a) Psi + e >= 0 (interior grid at tolerance 1e-9
/// plus exact tail limits) and (b) ||z - Psi|| < epsilon.
Theorem1Result theorem1_conditions(const PartitionCandidate& candidate,
                                   const economy::MarketModel& model,
                                   const economy::Equilibrium& eq, double epsilon);

/// Per-cell residuals min(1 + a0, 1 + a0 + a1) scaled by the actual payoff
/// and endowment limits, plus the grid minimum of 1 + Psi. Bounded payoff
/// family only.
struct ForcedBounds {
    std::vector<double> residuals;
    double min_one_plus_psi = 0.0;
};
ForcedBounds forced_bounds_check(const PartitionCandidate& candidate,
                                 const economy::MarketModel& model);

struct SearchParams {
    double t_star = 0.99;
    int max_cells = 16;
    long budget = 100000;       // cell-moment evaluations
    std::uint64_t seed = 1;
    bool enforce_feasibility = true;
    double coeff_bound = 100.0;
};

struct SearchLogEntry {
    int restart = 0;
    long evals = 0;
    double distance = 0.0;
    bool feasible = false;
};

struct SearchResult {
    PartitionCandidate best;
    double distance = std::numeric_limits<double>::infinity();
    double distance_verified = std::numeric_limits<double>::infinity();  // direct-quadrature recheck
    std::vector<SearchLogEntry> log;
    long evals_used = 0;
};

/// Random-restart coordinate descent over cell boundaries with exact
/// per-cell coefficient refresh (active-set QP), projecting onto the
/// feasible set after every step. Deterministic given the seed.
SearchResult search_best_feasible(const economy::MarketModel& model,
                                  const economy::Equilibrium& eq, const SearchParams& params);

/// Same machinery on the conditional problem of the unbounded-asset
/// certificate: candidates partition B(t_partition) and the objective is
/// || E[Psi - z | F_t*] ||.
SearchResult search_best_feasible_conditional(const economy::MarketModel& model,
                                              const economy::Equilibrium& eq, double t_star,
                                              const SearchParams& params);

struct Lemma1Result {
    double t_witness = std::numeric_limits<double>::quiet_NaN();  // t(eps)
    double sup_deviation_beyond_witness = 0.0;
    double sup_deviation_le_variant = 0.0;  // E[f | B(t) <= x0] - f(x0) beyond the witness
    std::vector<std::pair<double, double>> deviation_by_t;
    bool found = false;
};

/// Finds t(eps) < T such that |E[f(B(T)) | B(t)=x0] - f(x0)| < eps for
/// every grid t > t(eps) and every x0 in the grid; also checks the
/// conditional-on-{B(t) <= x0} variant.
Lemma1Result lemma1_verify(const economy::MarketModel& model, double epsilon,
                           std::span<const double> x0_grid, std::span<const double> t_grid);

struct Lemma2Result {
    double min_slack = std::numeric_limits<double>::infinity();
    std::vector<std::tuple<double, double, double>> slack_by_ct;  // (c, t, slack)
};

/// E[g(B(T)) | g(B(t)) >= c] >= c for the convex payoff family; returns the
/// minimum slack over the grids. Throws std::domain_error for non-convex g.
Lemma2Result lemma2_verify(const economy::MarketModel& model, std::span<const double> c_grid,
                           std::span<const double> t_grid);

struct Lemma3Result {
    double c_witness = 0.0;  // c(eps)
    double max_eq_value = 0.0;
    double max_le_value = 0.0;
    double tail_cut = 0.0;   // the M of the construction
};

/// Constructive witness c(eps) (level shift by the tail cut M), then
/// numeric verification that both conditional expectations stay below eps
/// on the t grid.
Lemma3Result lemma3_verify(const economy::MarketModel& model, double epsilon,
                           std::span<const double> t_grid);

struct Example1Params {
    double mu = 0.5;
    std::vector<int> cells = {1, 4, 16, 64};
    long budget = 100000;
    int seeds = 8;
    double t_star = 0.99;
    double diagnostic_t_star = 0.999;
    int diagnostic_cells = 64;
};

struct Example1Run {
    CertificateReport report;
    std::vector<SearchResult> searches;  // one per (cells, seed), cells-major
    SearchResult diagnostic;
};

/// Full bounded-asset certificate: constants, feasible searches over the
/// cell-count and seed grids (merged best by distance, ties to the lower
/// seed), the unconstrained diagnostic run, and the verdict
/// (gap_confirmed iff no feasible candidate in any search log beat
/// epsilon* - 1e-6).
Example1Run example1_certificate(const economy::MarketModel& model,
                                 const economy::Equilibrium& eq, const Example1Params& params);

struct Example2Params {
    double mu = 0.5;
    std::vector<int> cells = {1, 4, 16};
    long budget = 100000;
    int seeds = 8;
    double t_partition_fraction = 0.995;  // t** = fraction * t*
    double density_bound_K = 1.0;  // ||dQ/dP||_inf bound; widens the gap tolerance
};

struct Example2Run {
    CertificateReport report;
    std::vector<SearchResult> searches;
};

/// The conditional certificate: gap constants, the Lemma-1 witness t(eps),
/// t* with P(F_t*) > P(F_T)/2, conditional forced bounds, and the printed
/// lower bound (mu - 2 eps) P(F_t*) on || E[Psi - z | F_t*] ||^2 verified
/// over searched feasible candidates (the dimensionally-consistent squared
/// variant is reported alongside).
Example2Run example2_certificate(const economy::MarketModel& model,
                                 const economy::Equilibrium& eq, const Example2Params& params);

}  // namespace hedgegap::certification
