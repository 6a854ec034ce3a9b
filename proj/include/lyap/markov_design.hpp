#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "lyap/analysis.hpp"
#include "lyap/ensemble.hpp"
#include "lyap/errors.hpp"
#include "lyap/extended_real.hpp"

namespace lyap {

// Complete weighted digraph including self-loops. Built from an ensemble,
// W[i][j] = log|u_i^T v_j| is the cost of switching from matrix i to j.
struct WeightedDigraph {
    int n = 0;
    Eigen::MatrixXd W;  // entries may be NEG_INF
};

inline WeightedDigraph cost_digraph(const RankOneEnsemble& E, double ortho_tol = 0.0) {
    return WeightedDigraph{E.n(), cost_matrix(E, ortho_tol).raw};
}

struct CycleMean {
    double mean = 0.0;
    std::vector<int> cycle;  // nodes in traversal order; edges close cyclically
};

namespace detail {

inline double cycle_mean_of(const Eigen::MatrixXd& W, const std::vector<int>& cycle) {
    double s = 0.0;
    const int L = static_cast<int>(cycle.size());
    for (int t = 0; t < L; ++t) {
        const double e = W(cycle[t], cycle[(t + 1) % L]);
        if (is_neg_inf(e)) return NEG_INF;
        s += e;
    }
    return s / static_cast<double>(L);
}

// Every edge of a complete digraph lies on a self-loop or a 2-cycle, so a
// NEG_INF edge anywhere puts NEG_INF in the cycle spectrum. Returns the
// shortest witness, ties to the smallest indices.
inline bool neg_inf_cycle(const Eigen::MatrixXd& W, CycleMean& out) {
    const int n = static_cast<int>(W.rows());
    for (int i = 0; i < n; ++i)
        if (is_neg_inf(W(i, i))) {
            out.mean = NEG_INF;
            out.cycle = {i};
            return true;
        }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (is_neg_inf(W(i, j)) || is_neg_inf(W(j, i))) {
                out.mean = NEG_INF;
                out.cycle = {i, j};
                return true;
            }
    return false;
}

}  // namespace detail

// Karp's dynamic program for the minimum mean cycle. D[k][v] is the minimum
// weight of a k-edge walk from node 0 to v; the minimum cycle mean is
// min_v max_k (D[n][v] - D[k][v]) / (n - k) over finite D[k][v]. The witness
// cycle is any cycle on the predecessor walk of the arg-min: every cycle on
// that walk has mean exactly mu* (otherwise removing or repeating it would
// contradict the optimality of the walk under weights shifted by -mu*).
inline CycleMean min_cycle_mean_karp(const WeightedDigraph& Gw) {
    const int n = Gw.n;
    if (n < 1) throw argument_error("min_cycle_mean: graph must have at least one node");
    CycleMean out;
    if (detail::neg_inf_cycle(Gw.W, out)) return out;

    const double INF = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> D(n + 1, std::vector<double>(n, INF));
    std::vector<std::vector<int>> pred(n + 1, std::vector<int>(n, -1));
    D[0][0] = 0.0;
    for (int k = 1; k <= n; ++k)
        for (int v = 0; v < n; ++v) {
            double best = INF;
            int arg = -1;
            for (int u = 0; u < n; ++u) {
                if (D[k - 1][u] == INF) continue;
                const double cand = D[k - 1][u] + Gw.W(u, v);
                if (cand < best) {
                    best = cand;
                    arg = u;
                }
            }
            D[k][v] = best;
            pred[k][v] = arg;
        }

    double mu = INF;
    int v_star = -1;
    for (int v = 0; v < n; ++v) {
        if (D[n][v] == INF) continue;
        double worst = -INF;
        for (int k = 0; k < n; ++k) {
            if (D[k][v] == INF) continue;
            worst = std::max(worst, (D[n][v] - D[k][v]) / static_cast<double>(n - k));
        }
        if (worst < mu) {
            mu = worst;
            v_star = v;
        }
    }
    if (v_star < 0) throw numerical_error("min_cycle_mean: no cycle reachable from node 0");

    // Walk the predecessors back from (n, v_star) and cut out the first
    // repeated node.
    std::vector<int> walk(n + 1);
    walk[n] = v_star;
    for (int k = n; k > 0; --k) walk[k - 1] = pred[k][walk[k]];
    std::vector<int> seen(n, -1);
    for (int t = 0; t <= n; ++t) {
        if (seen[walk[t]] >= 0) {
            out.cycle.assign(walk.begin() + seen[walk[t]], walk.begin() + t);
            break;
        }
        seen[walk[t]] = t;
    }
    out.mean = mu;
    const double check = detail::cycle_mean_of(Gw.W, out.cycle);
    if (std::abs(check - mu) > 1e-10)
        throw numerical_error("min_cycle_mean: extracted cycle mean " + std::to_string(check) +
                              " disagrees with DP value " + std::to_string(mu));
    return out;
}

// Independent oracle: exhaustive enumeration of simple cycles (self-loops
// included), each cycle canonically started at its smallest node. Intended
// for cross-checking Karp on small graphs.
inline CycleMean min_cycle_mean_brute(const WeightedDigraph& Gw) {
    const int n = Gw.n;
    if (n < 1) throw argument_error("min_cycle_mean: graph must have at least one node");
    if (n > 8) throw argument_error("min_cycle_mean_brute: n must be <= 8");

    CycleMean best;
    bool have = false;
    std::vector<int> path;
    std::vector<bool> used(n, false);

    auto consider = [&](const std::vector<int>& cycle) {
        const double m = detail::cycle_mean_of(Gw.W, cycle);
        if (!have || m < best.mean ||
            (m == best.mean && (cycle.size() < best.cycle.size() ||
                                (cycle.size() == best.cycle.size() && cycle < best.cycle)))) {
            have = true;
            best.mean = m;
            best.cycle = cycle;
        }
    };

    std::function<void(int)> extend = [&](int start) {
        consider(path);
        for (int next = start + 1; next < n; ++next) {
            if (used[next]) continue;
            used[next] = true;
            path.push_back(next);
            extend(start);
            path.pop_back();
            used[next] = false;
        }
    };

    for (int s = 0; s < n; ++s) {
        used[s] = true;
        path = {s};
        extend(s);
        used[s] = false;
    }
    return best;
}

// Circulation: nonnegative flow with equal in- and out-degree at every node
// and total mass 1.
struct Circulation {
    Eigen::MatrixXd F;
};

// Uniform mass 1/|C| on each edge of the cycle; a self-loop gets mass 1.
inline Circulation cycle_to_circulation(const std::vector<int>& cycle, int n) {
    if (cycle.empty()) throw argument_error("cycle_to_circulation: empty cycle");
    std::vector<bool> seen(n, false);
    for (int v : cycle) {
        if (v < 0 || v >= n)
            throw argument_error("cycle_to_circulation: node out of range");
        if (seen[v])
            throw argument_error("cycle_to_circulation: node visited twice");
        seen[v] = true;
    }
    Circulation out;
    out.F = Eigen::MatrixXd::Zero(n, n);
    const int L = static_cast<int>(cycle.size());
    for (int t = 0; t < L; ++t)
        out.F(cycle[t], cycle[(t + 1) % L]) = 1.0 / static_cast<double>(L);
    return out;
}

// Markov kernel realizing a circulation: pi := F 1, Q[i][j] = F[i][j]/pi_i on
// rows with mass, and zero-mass rows are pointed at the smallest
// positive-mass index so that pi Q = pi and pi_i Q[i][j] = F[i][j] hold.
inline MarkovKernel circulation_to_markov(const Circulation& F) {
    const int n = static_cast<int>(F.F.rows());
    Eigen::VectorXd pi = F.F.rowwise().sum();
    int j_star = -1;
    for (int j = 0; j < n; ++j)
        if (pi(j) > 0.0) {
            j_star = j;
            break;
        }
    if (j_star < 0) throw argument_error("circulation_to_markov: circulation has no mass");
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        if (pi(i) > 0.0)
            for (int j = 0; j < n; ++j) Q(i, j) = F.F(i, j) / pi(i);
        else
            Q(i, j_star) = 1.0;
    }
    return MarkovKernel(Q);
}

// Optimal Markov switching plan: kernel, stationary distribution, achieved
// rate, and the witness cycle.
struct MarkovPlan {
    MarkovKernel Q;
    Eigen::VectorXd pi;
    double rate = 0.0;
    std::vector<int> cycle;
    Circulation F;
};

// The best irreducible Markov switching rate equals the minimum cycle mean
// of the cost digraph: a cycle induces a feasible circulation, circulations
// decompose into cycles, and the kernel construction realizes the optimum.
inline MarkovPlan design_markov(const RankOneEnsemble& E, double ortho_tol = 0.0) {
    const WeightedDigraph Gw = cost_digraph(E, ortho_tol);
    const CycleMean cm = min_cycle_mean_karp(Gw);
    Circulation F = cycle_to_circulation(cm.cycle, Gw.n);
    MarkovKernel Q = circulation_to_markov(F);
    const double rate = markov_rate(E, Q, ortho_tol);
    const bool same = (is_neg_inf(rate) && is_neg_inf(cm.mean)) ||
                      std::abs(rate - cm.mean) <= 1e-10;
    if (!same)
        throw numerical_error("design_markov: kernel rate disagrees with the cycle mean");
    Eigen::VectorXd pi = F.F.rowwise().sum();  // mass sits on the cycle nodes
    MarkovPlan plan{std::move(Q), std::move(pi), cm.mean, cm.cycle, std::move(F)};
    return plan;
}

}  // namespace lyap
