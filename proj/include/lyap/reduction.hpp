#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "lyap/analysis.hpp"
#include "lyap/ensemble.hpp"
#include "lyap/errors.hpp"
#include "lyap/graph.hpp"
#include "lyap/optimize.hpp"
#include "lyap/simplex.hpp"

namespace lyap {

// Executable form of the independent-set reduction: a graph G becomes the
// PSD matrix B = 3n I + exp[I + A_G] (entrywise exponential), B factors as
// U^T U, and the columns of U form a symmetric rank-one ensemble whose cost
// matrix is exactly log B = (I + A_G) + (log(3n + e) - 1) I. Minimizing the
// quadratic form over the simplex then sandwiches 1/alpha(G).
struct ReductionArtifacts {
    Eigen::MatrixXd B;
    Eigen::MatrixXd U;  // B = U^T U
    RankOneEnsemble ensemble;
    CostMatrix M;  // taken as log B exactly, not recomputed from U
};

inline ReductionArtifacts build_reduction(const UndirectedGraph& G) {
    const int n = G.n_nodes;
    const double e = std::exp(1.0);
    ReductionArtifacts art;
    art.B.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j)
                art.B(i, j) = 3.0 * n + e;
            else
                art.B(i, j) = G.adjacent(i, j) ? e : 1.0;
        }

    // Diagonal dominance makes B strictly PSD; check it rather than assume.
    for (int i = 0; i < n; ++i) {
        double off = 0.0;
        for (int j = 0; j < n; ++j)
            if (j != i) off += art.B(i, j);
        if (art.B(i, i) < off)
            throw numerical_error("build_reduction: diagonal dominance failed at row " +
                                  std::to_string(i + 1));
    }

    Eigen::LLT<Eigen::MatrixXd> llt(art.B);
    if (llt.info() != Eigen::Success)
        throw numerical_error("build_reduction: Cholesky factorization failed");
    art.U = Eigen::MatrixXd(llt.matrixL()).transpose();  // B = U^T U
    const double residual = (art.U.transpose() * art.U - art.B).cwiseAbs().maxCoeff();
    if (residual > 1e-8)
        throw numerical_error("build_reduction: factorization residual " +
                              std::to_string(residual));

    art.ensemble.d = n;
    for (int i = 0; i < n; ++i) {
        art.ensemble.u.push_back(art.U.col(i));
        art.ensemble.v.push_back(art.U.col(i));
    }
    art.M = CostMatrix::from_symmetric(art.B.array().log().matrix());
    return art;
}

struct SandwichReport {
    bool pass = false;
    double identity_max_dev = 0.0;   // max |M - (I + A_G) - (log(3n+e) - 1) I|
    double lower_max_violation = 0.0;  // max of (I + A_G) - M, clamped at 0
    double upper_max_violation = 0.0;  // max of M - log(3n+e) (I + A_G), clamped at 0
    int worst_i = 0, worst_j = 0;      // entry of the largest identity deviation
};

// Checks the exact identity M = (I + A_G) + (log(3n + e) - 1) I and the
// entrywise sandwich I + A_G <= M <= log(3n + e) (I + A_G).
inline SandwichReport verify_sandwich(const UndirectedGraph& G, const ReductionArtifacts& art,
                                      double tol = 1e-9) {
    const int n = G.n_nodes;
    const double logc = std::log(3.0 * n + std::exp(1.0));
    const Eigen::MatrixXd IA =
        adjacency_matrix(G) + Eigen::MatrixXd::Identity(n, n);
    SandwichReport rep;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double target = IA(i, j) + (i == j ? logc - 1.0 : 0.0);
            const double dev = std::abs(art.M.sym(i, j) - target);
            if (dev > rep.identity_max_dev) {
                rep.identity_max_dev = dev;
                rep.worst_i = i;
                rep.worst_j = j;
            }
            rep.lower_max_violation =
                std::max(rep.lower_max_violation, IA(i, j) - art.M.sym(i, j));
            rep.upper_max_violation =
                std::max(rep.upper_max_violation, art.M.sym(i, j) - logc * IA(i, j));
        }
    rep.lower_max_violation = std::max(rep.lower_max_violation, 0.0);
    rep.upper_max_violation = std::max(rep.upper_max_violation, 0.0);
    rep.pass = rep.identity_max_dev <= tol && rep.lower_max_violation <= tol &&
               rep.upper_max_violation <= tol;
    return rep;
}

struct MotzkinStrausReport {
    double alpha_inverse = 0.0;
    double optimizer_value = 0.0;
    double uniform_on_mis_value = 0.0;
    IndependenceResult independence;
};

// The minimum of p^T (I + A_G) p over the simplex equals 1/alpha(G), with
// equality attained by the uniform distribution on a maximum independent
// set. Reports both sides next to the optimizer's value.
inline MotzkinStrausReport motzkin_straus_check(const UndirectedGraph& G,
                                                const MinimizeOptions& hooks = {12, 2, 2000, 0,
                                                                                1e8}) {
    MotzkinStrausReport rep;
    rep.independence = independence_number(G);
    rep.alpha_inverse = 1.0 / static_cast<double>(rep.independence.alpha);

    const Eigen::MatrixXd IA =
        adjacency_matrix(G) + Eigen::MatrixXd::Identity(G.n_nodes, G.n_nodes);
    const CostMatrix C = CostMatrix::from_symmetric(IA);
    rep.optimizer_value = minimize_cost(C, hooks).value;

    std::vector<double> p(G.n_nodes, 0.0);
    for (int v : rep.independence.witness)
        p[v] = 1.0 / static_cast<double>(rep.independence.alpha);
    rep.uniform_on_mis_value = quadratic_form(IA, SimplexPoint(std::move(p)));
    return rep;
}

// Recovers a bracket for min p^T (log B) p by bisection with a
// stabilizability oracle on scaled copies of the reduction ensemble. The
// initial bracket [1/n, log(3n + e)] always contains the minimum, and the
// true minimum lies in [1/alpha, log(3n + e)/alpha].
inline SignQueryBracket alpha_via_sign_queries(const UndirectedGraph& G, double target_width) {
    const int n = G.n_nodes;
    if (n > 10)
        throw argument_error("alpha_via_sign_queries: graph has " + std::to_string(n) +
                             " nodes; the optimizer is only trusted as a sign oracle up to 10");
    const ReductionArtifacts art = build_reduction(G);
    const double hi = std::log(3.0 * n + std::exp(1.0));
    const double lo = 1.0 / static_cast<double>(n);
    auto oracle = [](const RankOneEnsemble& scaled) {
        const StabilizabilityResult r = decide_stabilizable(scaled, 1e-9);
        switch (r.verdict) {
            case Stabilizability::STABILIZABLE: return true;
            case Stabilizability::NOT_STABILIZABLE: return false;
            default: return r.value < 0.0;  // midpoint inside certification slack
        }
    };
    return refine_by_sign_queries(art.ensemble, lo, hi, target_width, oracle);
}

}  // namespace lyap
