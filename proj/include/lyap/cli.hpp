#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lyap/analysis.hpp"
#include "lyap/ensemble.hpp"
#include "lyap/errors.hpp"
#include "lyap/extended_real.hpp"
#include "lyap/graph.hpp"
#include "lyap/json_io.hpp"
#include "lyap/markov_design.hpp"
#include "lyap/optimize.hpp"
#include "lyap/reduction.hpp"
#include "lyap/simplex.hpp"
#include "lyap/simulate.hpp"
#include "lyap/special_functions.hpp"

namespace lyap {

inline constexpr const char* TOOL_VERSION = "1.0.0";

struct CommandResult {
    ordered_json payload;  // empty (null) when nothing should go to stdout
    int exit_code = 0;
};

namespace cli_detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw argument_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline nlohmann::json parse_json_file(const std::string& path) {
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error(path + ": " + e.what());
    }
}

// --dist CSV: comma-separated reals; must sum to 1 within 1e-6, then
// renormalized exactly.
inline SimplexPoint parse_dist(const std::string& csv) {
    std::vector<double> vals;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t pos = 0;
            const double x = std::stod(tok, &pos);
            while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos])))
                ++pos;
            if (pos != tok.size()) throw std::invalid_argument(tok);
            vals.push_back(x);
        } catch (const std::exception&) {
            throw argument_error("--dist: cannot parse '" + tok + "' as a real number");
        }
    }
    if (vals.empty()) throw argument_error("--dist: empty distribution");
    double s = 0.0;
    for (double x : vals) s += x;
    if (std::abs(s - 1.0) > 1e-6)
        throw argument_error("--dist: entries sum to " + std::to_string(s) +
                             ", expected 1 within 1e-6");
    return SimplexPoint(vals);
}

inline ordered_json envelope(const std::string& command, std::optional<long long> seed) {
    ordered_json out;
    out["tool"] = "lyap";
    out["version"] = TOOL_VERSION;
    out["command"] = command;
    if (seed)
        out["seed"] = *seed;
    else
        out["seed"] = nullptr;
    out["inputs"] = ordered_json::object();
    return out;
}

struct CommonArgs {
    std::string ensemble_path, graph_path, dist_csv, kernel_path, mixture_path, method;
    long long steps = 10000, trials = 8, seed = 0, grid_k = 200, restarts = 8, dim = 0;
    double tol = 1e-6, ortho_tol = 0.0;
    bool pretty = false;  // consumed by the binary, echoed here for completeness
};

}  // namespace cli_detail

// Parses and dispatches one invocation. argv excludes the program name.
// Diagnostics (usage and error text) go to err; the payload is returned for
// the caller to print. Exit codes: 0 success, 1 usage or input error,
// 2 numerical failure.
inline CommandResult run(const std::vector<std::string>& argv, std::ostream& err = std::cerr) {
    using cli_detail::CommonArgs;
    using cli_detail::envelope;

    CLI::App app{"Lyapunov exponents of rank-one matrix ensembles"};
    app.name("lyap");
    app.require_subcommand(1);
    CommonArgs a;

    auto add_ensemble = [&](CLI::App* c, bool required = true) {
        auto* opt = c->add_option("--ensemble", a.ensemble_path, "ensemble JSON file");
        if (required) opt->required();
    };
    auto add_graph = [&](CLI::App* c) {
        c->add_option("--graph", a.graph_path, "graph text file")->required();
    };
    auto add_seed = [&](CLI::App* c, bool required) {
        auto* opt = c->add_option("--seed", a.seed, "RNG seed (makes the run deterministic)");
        if (required) opt->required();
    };
    auto add_ortho = [&](CLI::App* c) {
        c->add_option("--ortho-tol", a.ortho_tol,
                      "treat |u_i^T v_j| <= this as an exact zero (default 0)");
    };
    auto add_pretty = [&](CLI::App* c) {
        c->add_flag("--pretty", a.pretty, "indent the JSON payload");
    };

    CLI::App* analyze = app.add_subcommand("analyze", "exact rates and vertex bounds");
    add_ensemble(analyze);
    analyze->add_option("--dist", a.dist_csv, "switching distribution, comma-separated");
    analyze->add_option("--mixture", a.mixture_path, "mixture JSON file (exchangeable rate)");
    analyze->add_option("--kernel", a.kernel_path, "Markov kernel JSON file (row-major)");
    add_ortho(analyze);
    add_pretty(analyze);

    CLI::App* optimize = app.add_subcommand("optimize", "minimize the rate over distributions");
    add_ensemble(optimize);
    add_seed(optimize, true);
    optimize->add_option("--grid-k", a.grid_k, "simplex grid resolution (default 200)");
    optimize->add_option("--restarts", a.restarts, "random refinement restarts (default 8)");
    add_ortho(optimize);
    add_pretty(optimize);

    CLI::App* decide = app.add_subcommand("decide", "three-way stabilizability verdict");
    add_ensemble(decide);
    decide->add_option("--tol", a.tol, "decision margin (default 1e-6)");
    add_ortho(decide);
    add_pretty(decide);

    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo rate estimation");
    add_ensemble(simulate);
    simulate->add_option("--dist", a.dist_csv, "switching distribution (i.i.d. methods)");
    simulate->add_option("--kernel", a.kernel_path, "Markov kernel JSON file (markov method)");
    simulate->add_option("--method", a.method, "dense | telescoped | markov (default telescoped)")
        ->check(CLI::IsMember({"dense", "telescoped", "markov"}));
    simulate->add_option("--steps", a.steps, "product length per trial (default 10000)");
    simulate->add_option("--trials", a.trials, "independent trials (default 8)");
    add_seed(simulate, true);
    add_ortho(simulate);
    add_pretty(simulate);

    CLI::App* convexity = app.add_subcommand("convexity", "conditional definiteness of the cost matrix");
    add_ensemble(convexity);
    add_ortho(convexity);
    add_pretty(convexity);

    CLI::App* reduce = app.add_subcommand("reduce", "graph to ensemble hardness reduction");
    add_graph(reduce);
    add_pretty(reduce);

    CLI::App* alpha = app.add_subcommand("alpha", "bracket the reduction optimum by sign queries");
    add_graph(alpha);
    alpha->add_option("--tol", a.tol, "target bracket width (default 1e-6)");
    add_pretty(alpha);

    CLI::App* markov = app.add_subcommand("markov", "optimal Markov switching plan");
    add_ensemble(markov);
    add_ortho(markov);
    add_pretty(markov);

    CLI::App* sphere = app.add_subcommand("sphere", "uniform-on-the-sphere closed form");
    long long dim = 0;
    sphere->add_option("--dim", dim, "ambient dimension, >= 2")->required();
    bool sphere_sim = false;
    sphere->add_flag("--simulate", sphere_sim, "also run the Monte Carlo estimator");
    sphere->add_option("--steps", a.steps, "product length per trial (default 10000)");
    sphere->add_option("--trials", a.trials, "independent trials (default 8)");
    add_seed(sphere, false);
    add_pretty(sphere);

    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        err << app.help();
        return {ordered_json(), 0};
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        err << "run 'lyap --help' for usage\n";
        return {ordered_json(), 1};
    }

    try {
        if (*analyze) {
            ordered_json out = envelope("analyze", std::nullopt);
            out["inputs"]["ensemble"] = a.ensemble_path;
            out["inputs"]["ortho_tol"] = a.ortho_tol;
            const RankOneEnsemble E = load_ensemble(cli_detail::read_file(a.ensemble_path));
            const CostMatrix C = cost_matrix(E, a.ortho_tol);
            const BoundsReport b = lyapunov_bounds(C);
            out["bounds"] = {{"lower", json_real(b.lower)},
                             {"upper", json_real(b.upper)},
                             {"argmax_vertex", b.argmax_vertex + 1}};
            if (!a.dist_csv.empty()) {
                out["inputs"]["dist"] = a.dist_csv;
                const SimplexPoint p = cli_detail::parse_dist(a.dist_csv);
                const double lam = lyapunov_exponent(C, p);
                out["lambda"] = json_real(lam);
                out["radius"] = std::exp(lam);
            }
            if (!a.mixture_path.empty()) {
                out["inputs"]["mixture"] = a.mixture_path;
                const MixturePlan mix =
                    mixture_from_json(cli_detail::parse_json_file(a.mixture_path));
                out["mixture_rate"] = json_real(exchangeable_rate(E, mix, a.ortho_tol));
            }
            if (!a.kernel_path.empty()) {
                out["inputs"]["kernel"] = a.kernel_path;
                const MarkovKernel K(matrix_from_json(
                    cli_detail::parse_json_file(a.kernel_path), a.kernel_path));
                out["markov_rate"] = json_real(markov_rate(E, K, a.ortho_tol));
                out["stationary"] = json_vector(stationary_distribution(K));
            }
            return {out, 0};
        }

        if (*optimize) {
            ordered_json out = envelope("optimize", a.seed);
            out["inputs"]["ensemble"] = a.ensemble_path;
            out["inputs"]["grid_k"] = a.grid_k;
            out["inputs"]["restarts"] = a.restarts;
            out["inputs"]["ortho_tol"] = a.ortho_tol;
            const RankOneEnsemble E = load_ensemble(cli_detail::read_file(a.ensemble_path));
            const OptimizationOutcome r =
                minimize(E, a.grid_k, static_cast<int>(a.restarts), 2000,
                         static_cast<std::uint64_t>(a.seed), a.ortho_tol);
            out["value"] = json_real(r.value);
            out["radius"] = std::exp(r.value);  // exp(-inf) = 0
            out["p_star"] = json_vector(r.p_star.coords());
            out["trace"] = {{"k_grid", r.trace.k_grid},
                            {"refine_iters", r.trace.refine_iters},
                            {"restarts", r.trace.restarts}};
            return {out, 0};
        }

        if (*decide) {
            ordered_json out = envelope("decide", std::nullopt);
            out["inputs"]["ensemble"] = a.ensemble_path;
            out["inputs"]["tol"] = a.tol;
            out["inputs"]["ortho_tol"] = a.ortho_tol;
            const RankOneEnsemble E = load_ensemble(cli_detail::read_file(a.ensemble_path));
            const StabilizabilityResult r = decide_stabilizable(E, a.tol, a.ortho_tol);
            out["verdict"] = to_string(r.verdict);
            out["witness"] = r.witness ? json_vector(r.witness->coords()) : ordered_json();
            out["value"] = json_real(r.value);
            if (r.verdict == Stabilizability::UNDETERMINED)
                out["bracket"] = {json_real(r.bracket_lo), json_real(r.bracket_hi)};
            return {out, 0};
        }

        if (*simulate) {
            ordered_json out = envelope("simulate", a.seed);
            const std::string method = a.method.empty() ? "telescoped" : a.method;
            out["inputs"]["ensemble"] = a.ensemble_path;
            out["inputs"]["method"] = method;
            out["inputs"]["steps"] = a.steps;
            out["inputs"]["trials"] = a.trials;
            out["inputs"]["ortho_tol"] = a.ortho_tol;
            const RankOneEnsemble E = load_ensemble(cli_detail::read_file(a.ensemble_path));
            if (a.steps < 1 || a.steps > 1000000000)
                throw argument_error("--steps must be in [1, 1e9]");
            const int steps = static_cast<int>(a.steps);
            const int trials = static_cast<int>(a.trials);
            const auto seed = static_cast<std::uint64_t>(a.seed);
            SimulationResult r;
            if (method == "markov") {
                if (a.kernel_path.empty())
                    throw argument_error("simulate --method markov requires --kernel");
                out["inputs"]["kernel"] = a.kernel_path;
                const MarkovKernel K(matrix_from_json(
                    cli_detail::parse_json_file(a.kernel_path), a.kernel_path));
                r = simulate_markov(E, K, steps, trials, seed, a.ortho_tol);
            } else {
                if (a.dist_csv.empty())
                    throw argument_error("simulate --method " + method + " requires --dist");
                out["inputs"]["dist"] = a.dist_csv;
                const SimplexPoint p = cli_detail::parse_dist(a.dist_csv);
                r = (method == "dense")
                        ? simulate_iid_dense(E, p, steps, trials, seed)
                        : simulate_iid_telescoped(E, p, steps, trials, seed, a.ortho_tol);
            }
            out["estimate"] = json_real(r.estimate);
            out["std_error"] = json_real(r.std_error);
            out["per_trial"] = json_vector(r.per_trial);
            return {out, 0};
        }

        if (*convexity) {
            ordered_json out = envelope("convexity", std::nullopt);
            out["inputs"]["ensemble"] = a.ensemble_path;
            out["inputs"]["ortho_tol"] = a.ortho_tol;
            const RankOneEnsemble E = load_ensemble(cli_detail::read_file(a.ensemble_path));
            const CostMatrix C = cost_matrix(E, a.ortho_tol);
            const DefinitenessReport r = conditional_definiteness(C);
            out["cond_psd"] = r.cond_psd;
            out["cond_nsd"] = r.cond_nsd;
            out["classification"] = r.cond_psd && r.cond_nsd ? "affine"
                                    : r.cond_psd             ? "convex"
                                    : r.cond_nsd             ? "concave"
                                                             : "neither";
            out["witness_psd_violation"] =
                r.witness_psd_violation ? json_vector(*r.witness_psd_violation) : ordered_json();
            out["witness_nsd_violation"] =
                r.witness_nsd_violation ? json_vector(*r.witness_nsd_violation) : ordered_json();
            if (E.symmetric())
                out["martin_triangle_violations"] = json_triples_1based(martin_triangle_check(E));
            else
                out["martin_triangle_violations"] = ordered_json();
            return {out, 0};
        }

        if (*reduce) {
            ordered_json out = envelope("reduce", std::nullopt);
            out["inputs"]["graph"] = a.graph_path;
            const UndirectedGraph G = load_graph(cli_detail::read_file(a.graph_path));
            const ReductionArtifacts art = build_reduction(G);
            const SandwichReport sw = verify_sandwich(G, art);
            out["n"] = G.n_nodes;
            out["edge_count"] = static_cast<long long>(G.edges.size());
            out["log_bound"] = std::log(3.0 * G.n_nodes + std::exp(1.0));
            out["B"] = json_matrix(art.B);
            out["M"] = json_matrix(art.M.sym);
            out["ensemble"] = ensemble_to_json(art.ensemble);
            out["sandwich"] = {{"pass", sw.pass},
                               {"identity_max_dev", sw.identity_max_dev},
                               {"lower_max_violation", sw.lower_max_violation},
                               {"upper_max_violation", sw.upper_max_violation}};
            if (G.n_nodes <= 30) {
                const IndependenceResult ir = independence_number(G);
                out["alpha"] = ir.alpha;
                out["alpha_witness"] = json_indices_1based(ir.witness);
            } else {
                out["alpha"] = ordered_json();
                out["alpha_witness"] = ordered_json();
            }
            return {out, 0};
        }

        if (*alpha) {
            ordered_json out = envelope("alpha", std::nullopt);
            out["inputs"]["graph"] = a.graph_path;
            out["inputs"]["tol"] = a.tol;
            const UndirectedGraph G = load_graph(cli_detail::read_file(a.graph_path));
            const SignQueryBracket br = alpha_via_sign_queries(G, a.tol);
            const IndependenceResult ir = independence_number(G);
            const double bound = std::log(3.0 * G.n_nodes + std::exp(1.0));
            const double lo_ms = 1.0 / ir.alpha;
            const double hi_ms = bound / ir.alpha;
            out["bracket"] = {json_real(br.lo), json_real(br.hi)};
            out["queries"] = br.queries;
            out["alpha_exact"] = ir.alpha;
            out["expected_range"] = {json_real(lo_ms), json_real(hi_ms)};
            out["consistent"] = !(br.hi < lo_ms - 1e-9 || br.lo > hi_ms + 1e-9);
            return {out, 0};
        }

        if (*markov) {
            ordered_json out = envelope("markov", std::nullopt);
            out["inputs"]["ensemble"] = a.ensemble_path;
            out["inputs"]["ortho_tol"] = a.ortho_tol;
            const RankOneEnsemble E = load_ensemble(cli_detail::read_file(a.ensemble_path));
            const MarkovPlan plan = design_markov(E, a.ortho_tol);
            out["rate"] = json_real(plan.rate);
            out["radius"] = std::exp(plan.rate);
            out["cycle"] = json_indices_1based(plan.cycle);
            out["kernel"] = json_matrix(plan.Q.Q);
            out["pi"] = json_vector(plan.pi);
            out["circulation"] = json_matrix(plan.F.F);
            return {out, 0};
        }

        if (*sphere) {
            const bool seeded = sphere->count("--seed") > 0;
            if (sphere_sim && !seeded)
                throw argument_error("sphere --simulate requires --seed");
            ordered_json out = envelope(
                "sphere", sphere_sim ? std::optional<long long>(a.seed) : std::nullopt);
            out["inputs"]["dim"] = dim;
            const SphereResult r = sphere_lyapunov(static_cast<int>(dim));
            out["exact"] = r.exact_value;
            out["asymptotic"] = r.asymptotic_value;
            if (sphere_sim) {
                out["inputs"]["steps"] = a.steps;
                out["inputs"]["trials"] = a.trials;
                if (a.steps < 1 || a.steps > 1000000000)
                    throw argument_error("--steps must be in [1, 1e9]");
                const SimulationResult s =
                    simulate_sphere(static_cast<int>(dim), static_cast<int>(a.steps),
                                    static_cast<int>(a.trials),
                                    static_cast<std::uint64_t>(a.seed));
                out["estimate"] = json_real(s.estimate);
                out["std_error"] = json_real(s.std_error);
                out["per_trial"] = json_vector(s.per_trial);
            }
            return {out, 0};
        }
    } catch (const parse_error& e) {
        err << "error: " << e.what() << "\n";
        return {ordered_json(), 1};
    } catch (const argument_error& e) {
        err << "error: " << e.what() << "\n";
        return {ordered_json(), 1};
    } catch (const numerical_error& e) {
        err << "numerical error: " << e.what() << "\n";
        return {ordered_json(), 2};
    }

    err << "error: no subcommand dispatched\n";
    return {ordered_json(), 1};
}

// Convenience for tests: returns the payload a successful run would print.
inline std::string payload_text(const CommandResult& r, bool pretty = false) {
    if (r.payload.is_null()) return std::string();
    return pretty ? r.payload.dump(2) : r.payload.dump();
}

inline int main_impl(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    const bool pretty =
        std::find(args.begin(), args.end(), std::string("--pretty")) != args.end();
    const CommandResult r = run(args);
    if (!r.payload.is_null()) std::cout << payload_text(r, pretty) << "\n";
    return r.exit_code;
}

}  // namespace lyap
