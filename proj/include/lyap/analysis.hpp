#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "lyap/ensemble.hpp"
#include "lyap/errors.hpp"
#include "lyap/extended_real.hpp"
#include "lyap/simplex.hpp"

namespace lyap {

// Exact rate of the random product: sum over the support of p of
// p_i p_j log|u_i^T v_j|. NEG_INF iff a touched entry is NEG_INF.
inline double lyapunov_exponent(const CostMatrix& C, const SimplexPoint& p) {
    if (static_cast<int>(p.size()) != C.n)
        throw argument_error("lyapunov_exponent: distribution has length " +
                             std::to_string(p.size()) + ", ensemble has " +
                             std::to_string(C.n) + " matrices");
    return quadratic_form(C.raw, p);
}

inline double lyapunov_exponent(const RankOneEnsemble& E, const SimplexPoint& p,
                                double ortho_tol = 0.0) {
    return lyapunov_exponent(cost_matrix(E, ortho_tol), p);
}

// e^lambda; NEG_INF maps to 0 (a.s. annihilation).
inline double spectral_radius(const RankOneEnsemble& E, const SimplexPoint& p,
                              double ortho_tol = 0.0) {
    return std::exp(lyapunov_exponent(E, p, ortho_tol));
}

// Vertex upper bound and entrywise lower bound of the quadratic form. The
// upper bound max_i sym[i][i] is attained by a vertex for symmetric
// ensembles; for asymmetric ensembles it is reported as the best vertex
// value without a global claim (see maximize()).
struct BoundsReport {
    double lower = 0.0;          // min_{i,j} sym[i][j]; may be NEG_INF
    double upper = 0.0;          // max_i sym[i][i]
    int argmax_vertex = 0;       // smallest index attaining the max
};

inline BoundsReport lyapunov_bounds(const CostMatrix& C) {
    BoundsReport r;
    r.lower = C.sym(0, 0);
    r.upper = C.sym(0, 0);
    r.argmax_vertex = 0;
    for (int i = 0; i < C.n; ++i)
        for (int j = 0; j < C.n; ++j)
            if (C.sym(i, j) < r.lower) r.lower = C.sym(i, j);
    for (int i = 1; i < C.n; ++i)
        if (C.sym(i, i) > r.upper) {
            r.upper = C.sym(i, i);
            r.argmax_vertex = i;
        }
    return r;
}

inline BoundsReport lyapunov_bounds(const RankOneEnsemble& E, double ortho_tol = 0.0) {
    return lyapunov_bounds(cost_matrix(E, ortho_tol));
}

// Definiteness of the quadratic form restricted to the hyperplane 1^T x = 0,
// which decides convexity/concavity of p -> lambda(E, p) on the simplex.
struct DefinitenessReport {
    bool cond_psd = true;
    bool cond_nsd = true;
    std::optional<Eigen::VectorXd> witness_psd_violation;  // 1^T x = 0, x^T M x < 0 (or -inf)
    std::optional<Eigen::VectorXd> witness_nsd_violation;  // 1^T x = 0, x^T M x > 0 (or +inf)
};

namespace detail {

// Orthonormal basis of the hyperplane orthogonal to the all-ones vector:
// columns 1..n-1 of the Householder reflector that swaps e_1 and 1/sqrt(n).
inline Eigen::MatrixXd ones_complement_basis(int n) {
    Eigen::VectorXd a = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    Eigen::VectorXd w = a - Eigen::VectorXd::Unit(n, 0);
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
    const double wn = w.squaredNorm();
    if (wn > 0.0) H -= (2.0 / wn) * (w * w.transpose());
    return H.rightCols(n - 1);
}

}  // namespace detail

inline DefinitenessReport conditional_definiteness(const CostMatrix& C, double tol = 1e-9) {
    DefinitenessReport rep;
    const int n = C.n;
    if (n == 1) return rep;  // the restricted space is empty

    if (!C.all_finite()) {
        // Classification by explicit witnesses along NEG_INF entries. A pair
        // (i, j) with sym[i][j] = -inf makes x = e_i - e_j blow the form up
        // to +inf (NSD violation) provided both diagonal entries are finite,
        // and x = e_i + e_j - 2 e_k drives it to -inf (PSD violation) when
        // the entries touching k stay finite. A NEG_INF diagonal entry i
        // gives a -inf value along e_i - e_j directly.
        auto fin = [&](int a, int b) { return !is_neg_inf(C.sym(a, b)); };
        for (int i = 0; i < n && rep.cond_nsd; ++i)
            for (int j = i + 1; j < n && rep.cond_nsd; ++j)
                if (!fin(i, j) && fin(i, i) && fin(j, j)) {
                    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
                    x(i) = 1.0;
                    x(j) = -1.0;
                    rep.cond_nsd = false;
                    rep.witness_nsd_violation = x;
                }
        for (int i = 0; i < n && rep.cond_psd; ++i)
            for (int j = 0; j < n && rep.cond_psd; ++j) {
                if (i == j || fin(i, j)) continue;
                if (i < j) {
                    for (int k = 0; k < n; ++k) {
                        if (k == i || k == j) continue;
                        if (fin(i, i) && fin(j, j) && fin(k, k) && fin(i, k) && fin(j, k)) {
                            Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
                            x(i) = 1.0;
                            x(j) = 1.0;
                            x(k) = -2.0;
                            rep.cond_psd = false;
                            rep.witness_psd_violation = x;
                            break;
                        }
                    }
                }
            }
        for (int i = 0; i < n && rep.cond_psd; ++i) {
            if (!is_neg_inf(C.sym(i, i))) continue;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                if (!is_neg_inf(C.sym(j, j)) && !is_neg_inf(C.sym(i, j))) {
                    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
                    x(i) = 1.0;
                    x(j) = -1.0;
                    rep.cond_psd = false;
                    rep.witness_psd_violation = x;
                    break;
                }
            }
        }
        return rep;
    }

    const Eigen::MatrixXd V = detail::ones_complement_basis(n);
    const Eigen::MatrixXd R = V.transpose() * C.sym * V;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (R + R.transpose()));
    const Eigen::VectorXd& ev = es.eigenvalues();
    if (ev(0) < -tol) {
        rep.cond_psd = false;
        rep.witness_psd_violation = V * es.eigenvectors().col(0);
    }
    if (ev(n - 2) > tol) {
        rep.cond_nsd = false;
        rep.witness_nsd_violation = V * es.eigenvectors().col(n - 2);
    }
    return rep;
}

// Triples (i, j, k) where the pairwise distances sqrt(-log|u_i^T u_j|)
// between the normalized lines violate the triangle inequality
// d(i,j) > d(i,k) + d(k,j). Nonempty output certifies the distances do not
// embed in a metric space, which is what breaks convexity of the design
// objective. Indices are 0-based with i < j.
inline std::vector<std::array<int, 3>> martin_triangle_check(const RankOneEnsemble& E,
                                                             double tol = 1e-9) {
    if (!E.symmetric())
        throw argument_error("martin_triangle_check: requires a symmetric ensemble (v = u)");
    const int n = E.n();
    Eigen::MatrixXd dist(n, n);
    std::vector<Eigen::VectorXd> unit(n);
    for (int i = 0; i < n; ++i) {
        const double norm = E.u[i].norm();
        if (norm == 0.0)
            throw argument_error("martin_triangle_check: zero vector at entry " +
                                 std::to_string(i + 1));
        unit[i] = E.u[i] / norm;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double c = std::abs(unit[i].dot(unit[j]));
            // Equal lines produce |cos| within a few ulps of 1, and the sqrt
            // turns that noise into ~1e-8 of spurious distance. Snap to zero;
            // this treats angles below ~1e-6 rad as zero.
            const double m = c >= 1.0 - 1e-12 ? 0.0 : -std::log(c);
            dist(i, j) = std::sqrt(m);
        }
    std::vector<std::array<int, 3>> out;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                if (dist(i, j) > dist(i, k) + dist(k, j) + tol) out.push_back({i, j, k});
            }
    return out;
}

// Finite mixture of i.i.d. switching distributions; the rate is the
// mixture-weighted average of the component rates (exactly linear).
struct MixturePlan {
    SimplexPoint weights;
    std::vector<SimplexPoint> components;

    MixturePlan(SimplexPoint w, std::vector<SimplexPoint> comps)
        : weights(std::move(w)), components(std::move(comps)) {
        if (weights.size() != components.size())
            throw argument_error("mixture: weights and components disagree in length");
    }
};

inline double exchangeable_rate(const RankOneEnsemble& E, const MixturePlan& mix,
                                double ortho_tol = 0.0) {
    const CostMatrix C = cost_matrix(E, ortho_tol);
    for (const auto& comp : mix.components)
        if (static_cast<int>(comp.size()) != C.n)
            throw argument_error("exchangeable_rate: component length does not match ensemble");
    double acc = 0.0;
    for (std::size_t m = 0; m < mix.components.size(); ++m) {
        const double w = mix.weights[m];
        if (w == 0.0) continue;
        const double t = weighted_term(w, lyapunov_exponent(C, mix.components[m]));
        if (is_neg_inf(t)) return NEG_INF;
        acc += t;
    }
    return acc;
}

// Row-stochastic switching kernel.
struct MarkovKernel {
    Eigen::MatrixXd Q;

    explicit MarkovKernel(Eigen::MatrixXd q) : Q(std::move(q)) {
        if (Q.rows() != Q.cols() || Q.rows() < 1)
            throw argument_error("markov kernel: matrix must be square and nonempty");
        for (int i = 0; i < Q.rows(); ++i) {
            double s = 0.0;
            for (int j = 0; j < Q.cols(); ++j) {
                if (Q(i, j) < 0.0)
                    throw argument_error("markov kernel: negative entry at row " +
                                         std::to_string(i + 1));
                s += Q(i, j);
            }
            if (std::abs(s - 1.0) > 1e-9)
                throw argument_error("markov kernel: row " + std::to_string(i + 1) +
                                     " sums to " + std::to_string(s));
        }
    }

    int n() const { return static_cast<int>(Q.rows()); }
};

namespace detail {

// Strongly connected components of the positive-entry digraph of Q
// (iterative Tarjan). Returns a component id per node.
inline std::vector<int> scc_ids(const Eigen::MatrixXd& Q, int& count) {
    const int n = static_cast<int>(Q.rows());
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1), stack;
    std::vector<bool> on_stack(n, false);
    int next_index = 0;
    count = 0;

    // Explicit DFS stack of (node, next neighbor to try).
    for (int s = 0; s < n; ++s) {
        if (index[s] != -1) continue;
        std::vector<std::pair<int, int>> dfs{{s, 0}};
        while (!dfs.empty()) {
            auto& [vtx, nxt] = dfs.back();
            if (nxt == 0) {
                index[vtx] = low[vtx] = next_index++;
                stack.push_back(vtx);
                on_stack[vtx] = true;
            }
            bool descended = false;
            while (nxt < n) {
                const int w = nxt++;
                if (Q(vtx, w) <= 0.0) continue;
                if (index[w] == -1) {
                    dfs.emplace_back(w, 0);
                    descended = true;
                    break;
                }
                if (on_stack[w]) low[vtx] = std::min(low[vtx], index[w]);
            }
            if (descended) continue;
            if (low[vtx] == index[vtx]) {
                while (true) {
                    const int w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = count;
                    if (w == vtx) break;
                }
                ++count;
            }
            const int child = vtx;
            dfs.pop_back();
            if (!dfs.empty()) low[dfs.back().first] = std::min(low[dfs.back().first], low[child]);
        }
    }
    return comp;
}

}  // namespace detail

// True iff the positive-entry digraph has exactly one recurrent (closed)
// strongly connected class. Transient states feeding into that class are
// allowed; two or more closed classes are not.
inline bool is_irreducible(const MarkovKernel& K) {
    const int n = K.n();
    int count = 0;
    const std::vector<int> comp = detail::scc_ids(K.Q, count);
    std::vector<bool> closed(count, true);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (K.Q(i, j) > 0.0 && comp[i] != comp[j]) closed[comp[i]] = false;
    int recurrent = 0;
    for (int c = 0; c < count; ++c)
        if (closed[c]) ++recurrent;
    return recurrent == 1;
}

// Stationary distribution with transient states at mass zero. Errors out on
// kernels with more than one closed class (no unique answer).
inline Eigen::VectorXd stationary_distribution(const MarkovKernel& K) {
    const int n = K.n();
    if (!is_irreducible(K))
        throw argument_error("ambiguous stationary distribution: kernel has multiple recurrent classes");
    int count = 0;
    const std::vector<int> comp = detail::scc_ids(K.Q, count);
    std::vector<bool> closed(count, true);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (K.Q(i, j) > 0.0 && comp[i] != comp[j]) closed[comp[i]] = false;
    std::vector<int> rec;
    for (int i = 0; i < n; ++i)
        if (closed[comp[i]]) rec.push_back(i);
    const int r = static_cast<int>(rec.size());

    // Solve pi Q_R = pi on the recurrent class: replace the first equation of
    // (Q_R^T - I) x = 0 with the normalization 1^T x = 1.
    Eigen::MatrixXd A(r, r);
    for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) A(a, b) = K.Q(rec[b], rec[a]) - (a == b ? 1.0 : 0.0);
    A.row(0).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(r);
    rhs(0) = 1.0;
    Eigen::VectorXd x = A.partialPivLu().solve(rhs);
    Eigen::VectorXd pi = Eigen::VectorXd::Zero(n);
    double mass = 0.0;
    for (int a = 0; a < r; ++a) {
        pi(rec[a]) = std::max(x(a), 0.0);
        mass += pi(rec[a]);
    }
    pi /= mass;
    return pi;
}

// Asymptotic rate under Markov switching: sum_i,j pi_i Q[i][j] raw[i][j],
// zero-mass terms skipped, NEG_INF absorbing.
inline double markov_rate(const RankOneEnsemble& E, const MarkovKernel& K,
                          double ortho_tol = 0.0) {
    const CostMatrix C = cost_matrix(E, ortho_tol);
    if (K.n() != C.n)
        throw argument_error("markov_rate: kernel size does not match ensemble");
    const Eigen::VectorXd pi = stationary_distribution(K);
    double acc = 0.0;
    for (int i = 0; i < C.n; ++i)
        for (int j = 0; j < C.n; ++j) {
            const double t = weighted_term(pi(i) * K.Q(i, j), C.raw(i, j));
            if (is_neg_inf(t)) return NEG_INF;
            acc += t;
        }
    return acc;
}

}  // namespace lyap
