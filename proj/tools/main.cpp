// Command-line front end: loads a market model config, runs the experiment
// suites, and writes human-readable reports plus machine-readable
// key-value/CSV files. Outputs are namespaced by a run id derived from the
// resolved configuration, so concurrent runs do not collide while reruns
// stay byte-identical.
//
// Exit codes: 0 success/confirmed, 1 config error, 2 model-validity error,
// 3 certificate violated.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "hedgegap/certification.hpp"
#include "hedgegap/common.hpp"
#include "hedgegap/hedging.hpp"
#include "hedgegap/report.hpp"

namespace fs = std::filesystem;
using namespace hedgegap;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitModel = 2;
constexpr int kExitViolated = 3;

struct CommonOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 1;
};

economy::MarketModel load_model(const CommonOptions& opts) {
    if (opts.config_path.empty()) return economy::default_market();
    return economy::load_market_config(opts.config_path);
}

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("-c,--config", opts.config_path, "market model config file");
    cmd->add_option("-o,--out", opts.out_dir, "output directory");
    cmd->add_option("-s,--seed", opts.seed, "base RNG seed");
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write output file: " + path.string());
    out << content;
}

std::string config_block(const economy::MarketModel& model) {
    std::ostringstream os;
    std::istringstream is(economy::resolved_config_text(model));
    std::string line, section;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line.front() == '[') {
            section = line.substr(1, line.size() - 2);
            continue;
        }
        os << "config." << section << "." << line << "\n";
    }
    return os.str();
}

int run_equilibrium(const CommonOptions& opts) {
    const auto model = load_model(opts);
    model.validate();
    const auto eq = economy::solve_equilibrium(model);

    std::cout << "gamma        = " << format_double(eq.gamma) << "\n";
    std::cout << "a            = " << format_double(eq.a) << "\n";
    std::cout << "foc_residual = " << format_double(eq.foc_residual) << "\n";
    std::cout << "margin 2 - a = " << format_double(eq.margin_below_two) << "\n";

    KeyValueReport kv;
    kv.put("equilibrium.gamma", eq.gamma);
    kv.put("equilibrium.a", eq.a);
    kv.put("equilibrium.consumption1", eq.consumption1());
    kv.put("equilibrium.consumption2", eq.consumption2());
    kv.put("equilibrium.foc_residual", eq.foc_residual);
    kv.put("equilibrium.margin_below_two", eq.margin_below_two);
    kv.put("equilibrium.state_price_normalization", eq.state_price_normalization);

    const std::string cfg = config_block(model);
    const std::string id = run_id(cfg + "equilibrium");
    fs::create_directories(opts.out_dir);
    write_file(fs::path(opts.out_dir) / ("equilibrium_" + id + ".kv"), cfg + kv.text());
    std::cout << "wrote " << (fs::path(opts.out_dir) / ("equilibrium_" + id + ".kv")).string()
              << "\n";
    return kExitOk;
}

void put_search_evidence(KeyValueReport& kv, const std::string& prefix,
                         const std::vector<certification::SearchResult>& searches,
                         const std::vector<int>& cells, int seeds) {
    for (std::size_t i = 0; i < searches.size(); ++i) {
        const int cell_count = cells.empty() ? 0 : cells[i / static_cast<std::size_t>(seeds)];
        const int seed = static_cast<int>(i % static_cast<std::size_t>(seeds)) + 1;
        const std::string key = prefix + "search." + std::to_string(cell_count) + "cells.seed" +
                                std::to_string(seed);
        kv.put(key + ".distance", searches[i].distance);
        kv.put(key + ".distance_verified", searches[i].distance_verified);
        kv.put(key + ".evals", static_cast<long long>(searches[i].evals_used));
    }
}

std::string search_log_text(const std::vector<certification::SearchResult>& searches) {
    std::ostringstream os;
    os << "search log (restart, evals, distance, feasible)\n";
    for (std::size_t i = 0; i < searches.size(); ++i) {
        os << "search " << i << " best " << format_double(searches[i].distance) << " verified "
           << format_double(searches[i].distance_verified) << "\n";
        for (const auto& e : searches[i].log)
            os << "  " << e.restart << " " << e.evals << " " << format_double(e.distance) << " "
               << (e.feasible ? "feasible" : "unconstrained") << "\n";
    }
    return os.str();
}

int run_certify_example1(const CommonOptions& opts, const certification::Example1Params& params) {
    const auto model = load_model(opts);
    model.validate();
    const auto eq = economy::solve_equilibrium(model);
    const auto run = certification::example1_certificate(model, eq, params);

    std::ostringstream text;
    run.report.write_text(text);
    std::cout << text.str();

    KeyValueReport kv;
    run.report.to_key_values(kv, "example1.");
    kv.put("example1.mu_admissible_max", certification::mu_upper_bound(model, eq, false));
    // sweep mu over its admissible range and report the bound-maximizing value
    const auto sweep = certification::mu_sweep(model, eq, 64);
    double mu_star = sweep.front().mu, best_bound = sweep.front().epsilon_star;
    for (const auto& row : sweep) {
        if (row.epsilon_star > best_bound) {
            best_bound = row.epsilon_star;
            mu_star = row.mu;
        }
    }
    kv.put("example1.mu_star", mu_star);
    kv.put("example1.epsilon_star_at_mu_star", best_bound);
    put_search_evidence(kv, "example1.", run.searches, params.cells, params.seeds);
    std::cout << "strongest certificate over the mu sweep: mu* = " << format_double(mu_star)
              << ", epsilon* = " << format_double(best_bound) << "\n";
    kv.put("example1.t_star", params.t_star);
    kv.put("example1.budget", static_cast<long long>(params.budget));
    kv.put("example1.seeds", params.seeds);
    kv.put("rng", mathkit::rng_algorithm());

    const std::string cfg = config_block(model);
    const std::string id = run_id(cfg + "example1" + kv.text());
    fs::create_directories(opts.out_dir);
    write_file(fs::path(opts.out_dir) / ("example1_" + id + ".kv"), cfg + kv.text());
    write_file(fs::path(opts.out_dir) / ("example1_" + id + ".txt"), text.str());
    if (run.report.verdict != certification::Verdict::gap_confirmed) {
        write_file(fs::path(opts.out_dir) / ("example1_" + id + "_searchlog.txt"),
                   search_log_text(run.searches));
        std::cerr << "certificate violated; full search log dumped\n";
        return kExitViolated;
    }
    return kExitOk;
}

int run_certify_example2(const CommonOptions& opts, const certification::Example2Params& params) {
    auto model = load_model(opts);
    if (model.asset1.bounded()) {
        // the conditional certificate needs the unbounded convex payoff
        std::cerr << "note: switching the risky asset to the exponential family\n";
        model.asset1 = economy::FunctionSpec::exponential(1.0, 1.0);
    }
    model.validate();
    const auto eq = economy::solve_equilibrium(model);
    const auto run = certification::example2_certificate(model, eq, params);

    std::ostringstream text;
    run.report.write_text(text);
    std::cout << text.str();

    KeyValueReport kv;
    run.report.to_key_values(kv, "example2.");
    put_search_evidence(kv, "example2.", run.searches, params.cells, params.seeds);
    kv.put("rng", mathkit::rng_algorithm());
    const std::string cfg = config_block(model);
    const std::string id = run_id(cfg + "example2" + kv.text());
    fs::create_directories(opts.out_dir);
    write_file(fs::path(opts.out_dir) / ("example2_" + id + ".kv"), cfg + kv.text());
    write_file(fs::path(opts.out_dir) / ("example2_" + id + ".txt"), text.str());
    if (run.report.verdict != certification::Verdict::gap_confirmed) {
        write_file(fs::path(opts.out_dir) / ("example2_" + id + "_searchlog.txt"),
                   search_log_text(run.searches));
        std::cerr << "certificate violated; full search log dumped\n";
        return kExitViolated;
    }
    return kExitOk;
}

int run_certify_lemmas(const CommonOptions& opts, double epsilon) {
    auto model = load_model(opts);
    if (model.asset1.bounded()) {
        std::cerr << "note: switching the risky asset to the exponential family\n";
        model.asset1 = economy::FunctionSpec::exponential(1.0, 1.0);
    }
    model.validate();
    const double T = model.horizon;

    std::vector<double> x0_grid;
    for (double x = -6.0; x <= 6.0 + 1e-12; x += 0.05) x0_grid.push_back(x);
    std::vector<double> t_grid;
    for (int k = 1; k <= 14; ++k) t_grid.push_back(T * (1.0 - std::pow(2.0, -k)));
    const auto lem1 = certification::lemma1_verify(model, epsilon, x0_grid, t_grid);

    std::vector<double> c_grid = {0.1, 0.2, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0};
    std::vector<double> t_grid2;
    for (double t = 0.1; t <= 0.9 + 1e-12; t += 0.1) t_grid2.push_back(t * T);
    const auto lem2 = certification::lemma2_verify(model, c_grid, t_grid2);

    std::vector<double> t_grid3;
    for (double t = std::max(epsilon, 0.05); t < 0.99 * T; t += 0.1) t_grid3.push_back(t);
    const auto lem3 = certification::lemma3_verify(model, epsilon, t_grid3);

    std::cout << "lemma1: t(eps) = " << format_double(lem1.t_witness)
              << ", sup deviation beyond = " << format_double(lem1.sup_deviation_beyond_witness)
              << "\n";
    std::cout << "lemma2: min slack = " << format_double(lem2.min_slack) << "\n";
    std::cout << "lemma3: c(eps) = " << format_double(lem3.c_witness)
              << ", max conditional values = " << format_double(lem3.max_eq_value) << " / "
              << format_double(lem3.max_le_value) << "\n";

    KeyValueReport kv;
    kv.put("lemmas.epsilon", epsilon);
    kv.put("lemma1.t_witness", lem1.t_witness);
    kv.put("lemma1.found", lem1.found);
    kv.put("lemma1.sup_deviation_beyond_witness", lem1.sup_deviation_beyond_witness);
    kv.put("lemma1.sup_deviation_le_variant", lem1.sup_deviation_le_variant);
    kv.put("lemma2.min_slack", lem2.min_slack);
    kv.put("lemma3.c_witness", lem3.c_witness);
    kv.put("lemma3.tail_cut", lem3.tail_cut);
    kv.put("lemma3.max_eq_value", lem3.max_eq_value);
    kv.put("lemma3.max_le_value", lem3.max_le_value);

    const std::string cfg = config_block(model);
    const std::string id = run_id(cfg + "lemmas" + kv.text());
    fs::create_directories(opts.out_dir);
    write_file(fs::path(opts.out_dir) / ("lemmas_" + id + ".kv"), cfg + kv.text());

    const bool pass = lem1.found && lem1.sup_deviation_beyond_witness < epsilon &&
                      lem2.min_slack >= -1e-9 && lem3.max_eq_value < epsilon &&
                      lem3.max_le_value < epsilon;
    if (!pass) {
        std::cerr << "lemma verification failed\n";
        return kExitViolated;
    }
    return kExitOk;
}

int run_hedge(const CommonOptions& opts, std::vector<int> ns, int paths,
              const std::string& scheme_name) {
    const auto model = load_model(opts);
    model.validate();
    const auto eq = economy::solve_equilibrium(model);
    const auto scheme = scheme_name == "geometric" ? approximation::Scheme::geometric_near_T
                                                   : approximation::Scheme::uniform;
    if (ns.empty()) ns = {1, 4, 16, 64, 256};
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

    // ensemble grid refining every schedule
    std::vector<double> grid;
    for (int n : ns)
        for (double t : approximation::rebalance_schedule(model.horizon, n, scheme))
            grid.push_back(t);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
               grid.end());
    const auto ensemble = mathkit::generate_paths(model.horizon, grid, paths, opts.seed);

    const auto table = approximation::measure_convergence(model, eq, ns, ensemble, scheme);
    for (const auto& row : table.rows)
        std::cout << "N=" << row.n << " l2_error=" << format_double(row.l2_error)
                  << " viol_prob=" << format_double(row.viol_prob)
                  << " worst_viol=" << format_double(row.worst_viol)
                  << " mean_viol=" << format_double(row.mean_viol)
                  << " sf_residual=" << format_double(row.self_financing_residual) << "\n";

    std::ostringstream csv;
    table.to_csv(csv);
    const std::string cfg = config_block(model);
    std::ostringstream tag;
    tag << cfg << "hedge seed=" << opts.seed << " paths=" << paths << " scheme=" << scheme_name;
    for (int n : ns) tag << " " << n;
    const std::string id = run_id(tag.str());
    fs::create_directories(opts.out_dir);
    write_file(fs::path(opts.out_dir) / ("hedge_" + id + ".csv"), csv.str());
    std::cout << "wrote " << (fs::path(opts.out_dir) / ("hedge_" + id + ".csv")).string() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-consumer Brownian exchange economy: equilibrium, feasibility-gap "
                 "certificates, and discrete-hedging experiments"};
    app.require_subcommand(1);

    CommonOptions eq_opts;
    auto* cmd_eq = app.add_subcommand("equilibrium", "solve the Walrasian equilibrium");
    add_common(cmd_eq, eq_opts);

    CommonOptions cert_opts;
    std::string which = "example1";
    double mu = 0.5;
    double epsilon = 0.05;
    long budget = 100000;
    int seeds = 8;
    std::vector<int> cells;
    double t_star = 0.99;
    auto* cmd_cert = app.add_subcommand("certify", "run a gap certificate or the lemma checks");
    add_common(cmd_cert, cert_opts);
    cmd_cert->add_option("-w,--which", which, "example1 | example2 | lemmas")
        ->check(CLI::IsMember({"example1", "example2", "lemmas"}));
    cmd_cert->add_option("--mu", mu, "gap parameter mu");
    cmd_cert->add_option("--epsilon", epsilon, "epsilon for the lemma checks");
    cmd_cert->add_option("--budget", budget, "search budget (cell evaluations)");
    cmd_cert->add_option("--seeds", seeds, "number of search seeds");
    cmd_cert->add_option("--cells", cells, "cell counts for the search");
    cmd_cert->add_option("--t-star", t_star, "partition time for the bounded-asset search");
    double density_bound = 1.0;
    cmd_cert->add_option("--density-bound", density_bound,
                         "bound K on the risk-neutral density dQ/dP (error budgets)");

    CommonOptions hedge_opts;
    std::vector<int> ns;
    int paths = 100000;
    std::string scheme = "uniform";
    auto* cmd_hedge = app.add_subcommand("hedge", "discretized-hedge convergence table");
    add_common(cmd_hedge, hedge_opts);
    cmd_hedge->add_option("--ns", ns, "rebalance counts");
    cmd_hedge->add_option("--paths", paths, "Monte Carlo paths");
    cmd_hedge->add_option("--scheme", scheme, "uniform | geometric")
        ->check(CLI::IsMember({"uniform", "geometric"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_eq->parsed()) return run_equilibrium(eq_opts);
        if (cmd_cert->parsed()) {
            if (which == "example1") {
                certification::Example1Params params;
                params.mu = mu;
                params.budget = budget;
                params.seeds = seeds;
                params.t_star = t_star;
                if (!cells.empty()) params.cells = cells;
                return run_certify_example1(cert_opts, params);
            }
            if (which == "example2") {
                certification::Example2Params params;
                params.mu = mu;
                params.budget = budget;
                params.seeds = seeds;
                params.density_bound_K = density_bound;
                if (!cells.empty()) params.cells = cells;
                return run_certify_example2(cert_opts, params);
            }
            return run_certify_lemmas(cert_opts, epsilon);
        }
        if (cmd_hedge->parsed()) return run_hedge(hedge_opts, ns, paths, scheme);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ModelError& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return kExitModel;
    } catch (const std::domain_error& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
