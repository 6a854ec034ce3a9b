#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lyap/analysis.hpp"
#include "lyap/ensemble.hpp"
#include "lyap/errors.hpp"
#include "lyap/extended_real.hpp"
#include "lyap/rng.hpp"
#include "lyap/simplex.hpp"

namespace lyap {

struct MethodTrace {
    long long k_grid = 0;
    int refine_iters = 0;
    int restarts = 0;
};

struct OptimizationOutcome {
    SimplexPoint p_star;
    double value = 0.0;
    MethodTrace trace;
    // Set by maximize() on asymmetric ensembles: the returned vertex is the
    // best vertex, but the vertex bound is only proven global for symmetric
    // ensembles.
    bool vertex_only_caveat = false;
};

// If the symmetrized cost has a NEG_INF entry, some distribution annihilates
// the product almost surely: e_i for a NEG_INF diagonal entry, otherwise the
// even mix of i and j. Smallest indices win for determinism.
inline std::optional<SimplexPoint> detect_neg_inf_witness(const CostMatrix& C) {
    for (int i = 0; i < C.n; ++i)
        if (is_neg_inf(C.sym(i, i))) return SimplexPoint::vertex(C.n, i);
    for (int i = 0; i < C.n; ++i)
        for (int j = i + 1; j < C.n; ++j)
            if (is_neg_inf(C.sym(i, j))) {
                std::vector<double> p(C.n, 0.0);
                p[i] = 0.5;
                p[j] = 0.5;
                return SimplexPoint(std::move(p));
            }
    return std::nullopt;
}

namespace detail {

struct GridScan {
    std::vector<long long> best_counts;
    double best_value = 0.0;  // exact S/k^2 of the best point
};

// Exhaustive scan of the simplex grid {c/k : c in Z^n_{>=0}, sum c = k}.
// Values are computed as S/k^2 with S = sum_ij c_i c_j M_ij; lexicographic
// enumeration plus strict improvement makes ties resolve to the
// lexicographically smallest point.
inline GridScan grid_scan(const Eigen::MatrixXd& M, long long k) {
    const int n = static_cast<int>(M.rows());
    GridScan out;
    bool first = true;
    const double kk = static_cast<double>(k) * static_cast<double>(k);
    for_each_grid_point(n, k, [&](const std::vector<long long>& c) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            if (c[i] == 0) continue;
            double row = 0.0;
            for (int j = 0; j < n; ++j) {
                if (c[j] == 0) continue;
                row += static_cast<double>(c[j]) * M(i, j);
            }
            s += static_cast<double>(c[i]) * row;
        }
        const double val = s / kk;
        if (first || val < out.best_value) {
            first = false;
            out.best_value = val;
            out.best_counts = c;
        }
    });
    return out;
}

inline SimplexPoint counts_to_point(const std::vector<long long>& c, long long k) {
    std::vector<double> p(c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        p[i] = static_cast<double>(c[i]) / static_cast<double>(k);
    return SimplexPoint(std::move(p));
}

inline void require_finite(const CostMatrix& C, const char* who) {
    if (!C.all_finite())
        throw argument_error(std::string(who) +
                             ": cost matrix has NEG_INF entries; call detect_neg_inf_witness first");
}

// True when (value, point) improves on the incumbent: smaller value, or an
// equal value with a lexicographically smaller point.
inline bool improves(double value, const std::vector<double>& p, double best_value,
                     const std::vector<double>& best_p) {
    if (value < best_value) return true;
    if (value > best_value) return false;
    return std::lexicographical_compare(p.begin(), p.end(), best_p.begin(), best_p.end());
}

}  // namespace detail

// Evaluates the quadratic form at every grid point with coordinates in
// (1/k_grid)Z. For quadratics the grid optimum is within
// (1/k_grid)(max_i M_ii - min) of the true minimum (sample a grid point by
// rounding an optimal p multinomially: the expected value of the rounded
// point exceeds the optimum by at most that much), so k_grid plays the role
// of the accuracy parameter 1/delta.
inline OptimizationOutcome grid_minimize(const CostMatrix& C, long long k_grid,
                                         double eval_budget = 1e8) {
    detail::require_finite(C, "grid_minimize");
    if (k_grid < 1) throw argument_error("grid_minimize: k_grid must be >= 1");
    const double count = grid_point_count(C.n, k_grid);
    if (count > eval_budget)
        throw argument_error("grid_minimize: " + std::to_string(count) +
                             " grid points exceed the evaluation budget of " +
                             std::to_string(eval_budget));
    detail::GridScan scan = detail::grid_scan(C.sym, k_grid);
    SimplexPoint p = detail::counts_to_point(scan.best_counts, k_grid);
    const double value = quadratic_form(C.sym, p);
    return OptimizationOutcome{p, value, MethodTrace{k_grid, 0, 0}, false};
}

// Projected gradient descent on p -> p^T sym p over the simplex with
// backtracking line search (Armijo constant 1/2, shrink 1/2, initial step
// 1). Monotone nonincreasing; stops when the unit-step projected gradient
// has norm below 1e-10 or after max_iters iterations.
inline OptimizationOutcome local_refine(const CostMatrix& C, const SimplexPoint& p0,
                                        int max_iters = 2000) {
    detail::require_finite(C, "local_refine");
    const int n = C.n;
    if (static_cast<int>(p0.size()) != n)
        throw argument_error("local_refine: start point length does not match cost matrix");
    const Eigen::MatrixXd& M = C.sym;
    Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(p0.coords().data(), n);
    double f = p.dot(M * p);
    int iters = 0;

    auto project = [n](const Eigen::VectorXd& x) {
        std::vector<double> v(x.data(), x.data() + n);
        v = project_to_simplex(std::move(v));
        return Eigen::Map<const Eigen::VectorXd>(v.data(), n).eval();
    };

    for (; iters < max_iters; ++iters) {
        const Eigen::VectorXd g = 2.0 * (M * p);
        if ((p - project(p - g)).norm() < 1e-10) break;
        double step = 1.0;
        bool accepted = false;
        Eigen::VectorXd q;
        double fq = 0.0;
        for (int bt = 0; bt < 60; ++bt) {
            q = project(p - step * g);
            fq = q.dot(M * q);
            if (fq <= f + 0.5 * g.dot(q - p)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        p = q;
        f = fq;
    }

    std::vector<double> pv(p.data(), p.data() + n);
    for (double& x : pv) x = std::max(x, 0.0);
    SimplexPoint out(std::move(pv));
    return OptimizationOutcome{out, quadratic_form(M, out), MethodTrace{0, iters, 0}, false};
}

struct MinimizeOptions {
    long long k_grid = 200;
    int restarts = 8;
    int max_iters = 2000;
    std::uint64_t seed = 0;
    double eval_budget = 1e8;
};

// Grid scan, then projected-gradient polish from the grid optimum and from
// `restarts` random interior points. Ties between candidates break to the
// lexicographically smallest point.
inline OptimizationOutcome minimize_cost(const CostMatrix& C, const MinimizeOptions& opts) {
    detail::require_finite(C, "minimize");
    OptimizationOutcome grid = grid_minimize(C, opts.k_grid, opts.eval_budget);
    OptimizationOutcome best = local_refine(C, grid.p_star, opts.max_iters);
    int total_iters = best.trace.refine_iters;
    SplitMix64 g(opts.seed);
    for (int r = 0; r < opts.restarts; ++r) {
        SimplexPoint p0(random_interior_point(C.n, g));
        OptimizationOutcome cand = local_refine(C, p0, opts.max_iters);
        total_iters += cand.trace.refine_iters;
        if (detail::improves(cand.value, cand.p_star.coords(), best.value,
                             best.p_star.coords()))
            best = cand;
    }
    best.trace = MethodTrace{opts.k_grid, total_iters, opts.restarts};
    return best;
}

inline OptimizationOutcome minimize(const RankOneEnsemble& E, long long k_grid = 200,
                                    int restarts = 8, int max_iters = 2000,
                                    std::uint64_t seed = 0, double ortho_tol = 0.0) {
    const CostMatrix C = cost_matrix(E, ortho_tol);
    if (auto w = detect_neg_inf_witness(C))
        return OptimizationOutcome{*w, NEG_INF, MethodTrace{0, 0, 0}, false};
    MinimizeOptions opts;
    opts.k_grid = k_grid;
    opts.restarts = restarts;
    opts.max_iters = max_iters;
    opts.seed = seed;
    return minimize_cost(C, opts);
}

// The maximum over the simplex is attained at a vertex for symmetric
// ensembles (the form is then a correlation-type matrix bounded by its
// diagonal on the simplex); for asymmetric ensembles the best vertex is
// returned with the caveat flag set, since the vertex bound can fail there.
inline OptimizationOutcome maximize(const RankOneEnsemble& E, double ortho_tol = 0.0) {
    const CostMatrix C = cost_matrix(E, ortho_tol);
    int best = 0;
    for (int i = 1; i < C.n; ++i)
        if (C.sym(i, i) > C.sym(best, best)) best = i;
    SimplexPoint p = SimplexPoint::vertex(C.n, best);
    return OptimizationOutcome{p, C.sym(best, best), MethodTrace{1, 0, 0}, !E.symmetric()};
}

enum class Stabilizability { STABILIZABLE, NOT_STABILIZABLE, UNDETERMINED };

inline const char* to_string(Stabilizability s) {
    switch (s) {
        case Stabilizability::STABILIZABLE: return "STABILIZABLE";
        case Stabilizability::NOT_STABILIZABLE: return "NOT_STABILIZABLE";
        default: return "UNDETERMINED";
    }
}

struct StabilizabilityResult {
    Stabilizability verdict = Stabilizability::UNDETERMINED;
    std::optional<SimplexPoint> witness;  // present iff STABILIZABLE
    double value = 0.0;                   // best rate found (may be NEG_INF)
    double bracket_lo = 0.0;              // certified lower bound on the true min
    double bracket_hi = 0.0;              // best upper bound found
};

// Honest three-way decision: STABILIZABLE with a witness when the optimizer
// finds a rate below -tol, NOT_STABILIZABLE when a certified lower bound
// keeps the minimum at or above 0, and otherwise UNDETERMINED with the
// bracket. The exact decision is NP-hard in general, so the bracket is the
// truthful answer when certification falls short.
inline StabilizabilityResult decide_stabilizable(const RankOneEnsemble& E, double tol = 1e-6,
                                                 double ortho_tol = 0.0) {
    if (!(tol > 0.0)) throw argument_error("decide_stabilizable: tol must be positive");
    const CostMatrix C = cost_matrix(E, ortho_tol);
    StabilizabilityResult r;

    if (auto w = detect_neg_inf_witness(C)) {
        r.verdict = Stabilizability::STABILIZABLE;
        r.witness = *w;
        r.value = NEG_INF;
        r.bracket_lo = NEG_INF;
        r.bracket_hi = NEG_INF;
        return r;
    }

    double entry_min = C.sym(0, 0), diag_min = C.sym(0, 0);
    for (int i = 0; i < C.n; ++i) {
        diag_min = std::min(diag_min, C.sym(i, i));
        for (int j = 0; j < C.n; ++j) entry_min = std::min(entry_min, C.sym(i, j));
    }
    if (entry_min >= 0.0) {
        r.verdict = Stabilizability::NOT_STABILIZABLE;
        r.value = diag_min;
        r.bracket_lo = entry_min;
        r.bracket_hi = diag_min;
        return r;
    }

    // Adaptive grid: the largest k (up to 48) whose grid fits the budget.
    long long k = 48;
    while (k > 2 && grid_point_count(C.n, k) > 2e6) --k;
    MinimizeOptions opts;
    opts.k_grid = k;
    opts.restarts = 8;
    opts.max_iters = 2000;
    opts.seed = 0x5eedu;
    const detail::GridScan scan = detail::grid_scan(C.sym, k);
    OptimizationOutcome best = local_refine(C, detail::counts_to_point(scan.best_counts, k),
                                            opts.max_iters);
    SplitMix64 g(opts.seed);
    for (int rr = 0; rr < opts.restarts; ++rr) {
        SimplexPoint p0(random_interior_point(C.n, g));
        OptimizationOutcome cand = local_refine(C, p0, opts.max_iters);
        if (detail::improves(cand.value, cand.p_star.coords(), best.value,
                             best.p_star.coords()))
            best = cand;
    }

    double diag_max = C.sym(0, 0);
    for (int i = 1; i < C.n; ++i) diag_max = std::max(diag_max, C.sym(i, i));
    // Certified bound from the grid guarantee: grid_min <= min + (diag_max - min)/k.
    const double kd = static_cast<double>(k);
    const double grid_lb = (scan.best_value - diag_max / kd) / (1.0 - 1.0 / kd);
    const double lb = std::max(entry_min, grid_lb);

    r.value = best.value;
    r.bracket_lo = lb;
    r.bracket_hi = best.value;
    if (best.value < -tol) {
        r.verdict = Stabilizability::STABILIZABLE;
        r.witness = best.p_star;
    } else if (best.value >= tol && grid_lb > 0.0) {
        r.verdict = Stabilizability::NOT_STABILIZABLE;
    } else {
        r.verdict = Stabilizability::UNDETERMINED;
    }
    return r;
}

struct SignQueryBracket {
    double lo = 0.0;
    double hi = 0.0;
    int queries = 0;
};

// Bisection on the shift parameter: scaling the ensemble by e^{-m} shifts
// every rate by -m, so a stabilizability oracle answers sign(min - m). The
// oracle returns true iff the scaled ensemble is stabilizable (min < m).
inline SignQueryBracket refine_by_sign_queries(
    const RankOneEnsemble& E, double lo, double hi, double target_width,
    const std::function<bool(const RankOneEnsemble&)>& oracle) {
    if (!(target_width > 0.0))
        throw argument_error("refine_by_sign_queries: target width must be positive");
    if (lo > hi) throw argument_error("refine_by_sign_queries: inverted bracket");
    SignQueryBracket b;
    b.lo = lo;
    b.hi = hi;
    double largest_false = -std::numeric_limits<double>::infinity();
    double smallest_true = std::numeric_limits<double>::infinity();
    while (b.hi - b.lo > target_width) {
        const double mid = 0.5 * (b.lo + b.hi);
        ++b.queries;
        if (oracle(scale_ensemble(E, std::exp(-mid)))) {
            smallest_true = std::min(smallest_true, mid);
            b.hi = mid;
        } else {
            largest_false = std::max(largest_false, mid);
            b.lo = mid;
        }
        if (largest_false > smallest_true)
            throw numerical_error("refine_by_sign_queries: inconsistent oracle answers");
    }
    return b;
}

struct ConditioningParams {
    double delta = 0.0;  // accuracy fraction in (0, 1]
    double gamma = 0.0;  // lower bound on |cos angle(u_i, u_j)| in (0, 1]
};

// Additive guarantee delta * log(1/gamma) of the grid scheme on symmetric,
// unit-normalized ensembles whose pairwise |cosines| stay above gamma.
// Verifies the preconditions and names the first offending pair.
inline double ptas_error_bound(const RankOneEnsemble& E, const ConditioningParams& params) {
    if (!(params.delta > 0.0 && params.delta <= 1.0))
        throw argument_error("ptas_error_bound: delta must be in (0, 1]");
    if (!(params.gamma > 0.0 && params.gamma <= 1.0))
        throw argument_error("ptas_error_bound: gamma must be in (0, 1]");
    if (!E.symmetric())
        throw argument_error("ptas_error_bound: requires a symmetric ensemble (v = u)");
    const int n = E.n();
    for (int i = 0; i < n; ++i)
        if (std::abs(E.u[i].norm() - 1.0) > 1e-9)
            throw argument_error("ptas_error_bound: vector " + std::to_string(i + 1) +
                                 " is not unit-normalized");
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double c = std::abs(E.u[i].dot(E.u[j]));
            if (c < params.gamma - 1e-12)
                throw argument_error("ptas_error_bound: conditioning violated for pair (" +
                                     std::to_string(i + 1) + ", " + std::to_string(j + 1) +
                                     "): |cos| = " + std::to_string(c));
        }
    return params.delta * std::log(1.0 / params.gamma);
}

}  // namespace lyap
