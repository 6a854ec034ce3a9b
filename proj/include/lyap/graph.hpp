#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <istream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lyap/errors.hpp"
#include "lyap/rng.hpp"

namespace lyap {

// Simple undirected graph: node count plus a sorted, deduplicated edge list.
// Nodes are 0-based in the API; the text format is 1-based.
struct UndirectedGraph {
    int n_nodes = 0;
    std::vector<std::pair<int, int>> edges;  // (i, j) with i < j

    bool adjacent(int i, int j) const {
        if (i > j) std::swap(i, j);
        return std::binary_search(edges.begin(), edges.end(), std::make_pair(i, j));
    }
};

inline UndirectedGraph make_graph(int n_nodes, std::vector<std::pair<int, int>> edges) {
    if (n_nodes < 1) throw argument_error("graph: node count must be >= 1");
    for (auto& [a, b] : edges) {
        if (a == b)
            throw argument_error("graph: self-loop at node " + std::to_string(a + 1));
        if (a < 0 || b < 0 || a >= n_nodes || b >= n_nodes)
            throw argument_error("graph: edge endpoint out of range");
        if (a > b) std::swap(a, b);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return UndirectedGraph{n_nodes, std::move(edges)};
}

// Text format: first line is the node count, then one "i j" edge per line,
// 1-based; blank lines are ignored.
inline UndirectedGraph load_graph(std::istream& in) {
    std::string line;
    int n_nodes = -1;
    std::vector<std::pair<int, int>> edges;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        if (n_nodes < 0) {
            if (!(ls >> n_nodes) || n_nodes < 1)
                throw parse_error("graph line " + std::to_string(line_no) +
                                  ": expected a positive node count");
            std::string rest;
            if (ls >> rest)
                throw parse_error("graph line " + std::to_string(line_no) +
                                  ": unexpected trailing text");
            continue;
        }
        int a = 0, b = 0;
        if (!(ls >> a)) continue;  // blank line
        if (!(ls >> b))
            throw parse_error("graph line " + std::to_string(line_no) +
                              ": expected two node indices");
        std::string rest;
        if (ls >> rest)
            throw parse_error("graph line " + std::to_string(line_no) +
                              ": unexpected trailing text");
        if (a == b)
            throw parse_error("graph line " + std::to_string(line_no) + ": self-loop at node " +
                              std::to_string(a));
        if (a < 1 || b < 1 || a > n_nodes || b > n_nodes)
            throw parse_error("graph line " + std::to_string(line_no) + ": node out of range");
        edges.emplace_back(a - 1, b - 1);
    }
    if (n_nodes < 1) throw parse_error("graph: missing node count");
    return make_graph(n_nodes, std::move(edges));
}

inline UndirectedGraph load_graph(const std::string& text) {
    std::istringstream in(text);
    return load_graph(in);
}

inline Eigen::MatrixXd adjacency_matrix(const UndirectedGraph& G) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(G.n_nodes, G.n_nodes);
    for (auto [a, b] : G.edges) {
        A(a, b) = 1.0;
        A(b, a) = 1.0;
    }
    return A;
}

// Seeded G(n, p) fixture generator; edge (i, j) present iff the next uniform
// is below p, pairs visited in lexicographic order.
inline UndirectedGraph random_graph(int n_nodes, std::uint64_t seed, double edge_prob = 0.5) {
    SplitMix64 g(seed);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n_nodes; ++i)
        for (int j = i + 1; j < n_nodes; ++j)
            if (g.next_uniform() < edge_prob) edges.emplace_back(i, j);
    return make_graph(n_nodes, std::move(edges));
}

struct IndependenceResult {
    int alpha = 0;
    std::vector<int> witness;  // a maximum independent set, ascending
};

// Exact maximum independent set by branch and bound on adjacency bitmasks.
// Bound: candidates are greedily covered by cliques; each clique contributes
// at most one node to any independent set. Default cap keeps runtimes to
// desk scale.
inline IndependenceResult independence_number(const UndirectedGraph& G, int node_cap = 30) {
    const int n = G.n_nodes;
    if (n > node_cap)
        throw argument_error("independence_number: graph has " + std::to_string(n) +
                             " nodes, brute-force cap is " + std::to_string(node_cap));
    std::vector<std::uint64_t> adj(n, 0);
    for (auto [a, b] : G.edges) {
        adj[a] |= 1ull << b;
        adj[b] |= 1ull << a;
    }

    int best = 0;
    std::uint64_t best_set = 0;

    auto clique_cover_bound = [&](std::uint64_t cand) {
        int cliques = 0;
        while (cand) {
            const int v = std::countr_zero(cand);
            std::uint64_t clique = 1ull << v;
            std::uint64_t common = adj[v] & cand;
            cand &= ~(1ull << v);
            while (common) {
                const int w = std::countr_zero(common);
                clique |= 1ull << w;
                cand &= ~(1ull << w);
                common &= adj[w] & ~(1ull << w);
            }
            ++cliques;
        }
        return cliques;
    };

    std::function<void(std::uint64_t, std::uint64_t, int)> rec =
        [&](std::uint64_t cand, std::uint64_t chosen, int size) {
            if (size > best) {
                best = size;
                best_set = chosen;
            }
            if (!cand) return;
            if (size + clique_cover_bound(cand) <= best) return;
            // Pivot on the candidate of maximum degree within the candidate
            // set (smallest index on ties): including it prunes the most.
            int pivot = -1, pivot_deg = -1;
            for (std::uint64_t m = cand; m;) {
                const int v = std::countr_zero(m);
                m &= m - 1;
                const int deg = std::popcount(adj[v] & cand);
                if (deg > pivot_deg) {
                    pivot_deg = deg;
                    pivot = v;
                }
            }
            rec(cand & ~(1ull << pivot) & ~adj[pivot], chosen | (1ull << pivot), size + 1);
            rec(cand & ~(1ull << pivot), chosen, size);
        };

    rec(n == 64 ? ~0ull : (1ull << n) - 1, 0, 0);

    IndependenceResult r;
    r.alpha = best;
    for (int i = 0; i < n; ++i)
        if (best_set & (1ull << i)) r.witness.push_back(i);
    return r;
}

}  // namespace lyap
