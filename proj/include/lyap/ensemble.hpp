#pragma once

#include <Eigen/Dense>
#include <istream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lyap/errors.hpp"
#include "lyap/extended_real.hpp"
#include "lyap/rng.hpp"
#include "lyap/simplex.hpp"

namespace lyap {

// A finite set {u_i v_i^T} of rank-one d x d matrices, stored as factor
// pairs. Zero u or v is permitted (the zero matrix); orthogonal pairs show up
// as NEG_INF entries in the cost matrix rather than being rejected.
struct RankOneEnsemble {
    int d = 0;
    std::vector<Eigen::VectorXd> u;
    std::vector<Eigen::VectorXd> v;

    int n() const { return static_cast<int>(u.size()); }

    Eigen::MatrixXd matrix(int i) const { return u[i] * v[i].transpose(); }

    // True when every pair has v_i identical to u_i (symmetric matrices).
    bool symmetric() const {
        for (std::size_t i = 0; i < u.size(); ++i)
            if (!(u[i].array() == v[i].array()).all()) return false;
        return true;
    }
};

// Pairwise log-inner-product costs. raw[i][j] = log|u_i^T v_j| drives the
// exact rate formula; sym = (raw + raw^T)/2 (NEG_INF absorbing) is the
// symmetric quadratic form with the same values on the simplex.
struct CostMatrix {
    int n = 0;
    Eigen::MatrixXd raw;
    Eigen::MatrixXd sym;

    bool all_finite() const {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (is_neg_inf(sym(i, j))) return false;
        return true;
    }

    // Wraps an already-symmetric finite matrix (raw = sym = M). Used by the
    // graph pipelines, which optimize explicit matrices.
    static CostMatrix from_symmetric(const Eigen::MatrixXd& M) {
        CostMatrix c;
        c.n = static_cast<int>(M.rows());
        c.raw = M;
        c.sym = M;
        return c;
    }
};

// p^T M p under the conventions: zero-weight terms contribute 0 even against
// NEG_INF, and any touched NEG_INF entry makes the whole form NEG_INF.
inline double quadratic_form(const Eigen::MatrixXd& M, const std::vector<double>& p) {
    const int n = static_cast<int>(p.size());
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        if (p[i] == 0.0) continue;
        for (int j = 0; j < n; ++j) {
            if (p[j] == 0.0) continue;
            const double w = p[i] * p[j];
            const double t = weighted_term(w, M(i, j));
            if (is_neg_inf(t)) return NEG_INF;
            acc += t;
        }
    }
    return acc;
}

inline double quadratic_form(const Eigen::MatrixXd& M, const SimplexPoint& p) {
    return quadratic_form(M, p.coords());
}

// --- construction and transforms ---------------------------------------

inline RankOneEnsemble ensemble_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw parse_error("ensemble: top level must be a JSON object");
    if (!j.contains("d") || !j["d"].is_number_integer())
        throw parse_error("ensemble: missing integer field \"d\"");
    const long long d = j["d"].get<long long>();
    if (d < 1) throw parse_error("ensemble: dimension d must be >= 1");
    if (!j.contains("matrices") || !j["matrices"].is_array())
        throw parse_error("ensemble: missing array field \"matrices\"");
    const auto& ms = j["matrices"];
    if (ms.empty()) throw parse_error("empty ensemble");

    auto read_vec = [d](const nlohmann::json& a, const std::string& where) {
        if (!a.is_array())
            throw parse_error(where + ": expected an array of " + std::to_string(d) + " numbers");
        if (static_cast<long long>(a.size()) != d)
            throw parse_error(where + ": has length " + std::to_string(a.size()) +
                              ", expected " + std::to_string(d));
        Eigen::VectorXd x(d);
        for (long long t = 0; t < d; ++t) {
            if (!a[t].is_number())
                throw parse_error(where + ": entry " + std::to_string(t + 1) + " is not a number");
            x(t) = a[t].get<double>();
        }
        return x;
    };

    RankOneEnsemble E;
    E.d = static_cast<int>(d);
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const std::string where = "matrix " + std::to_string(i + 1);
        const auto& m = ms[i];
        if (!m.is_object() || !m.contains("u"))
            throw parse_error(where + ": expected an object with field \"u\"");
        Eigen::VectorXd ui = read_vec(m["u"], where + ": u");
        // "u" alone is the symmetric shorthand v := u.
        Eigen::VectorXd vi = m.contains("v") ? read_vec(m["v"], where + ": v") : ui;
        E.u.push_back(std::move(ui));
        E.v.push_back(std::move(vi));
    }
    return E;
}

inline RankOneEnsemble load_ensemble(std::istream& in) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error(std::string("ensemble: ") + e.what());
    }
    return ensemble_from_json(j);
}

inline RankOneEnsemble load_ensemble(const std::string& text) {
    std::istringstream in(text);
    return load_ensemble(in);
}

// Inner products with |.| <= ortho_tol collapse to NEG_INF; the default 0
// maps exact zeros only.
inline CostMatrix cost_matrix(const RankOneEnsemble& E, double ortho_tol = 0.0) {
    if (ortho_tol < 0.0) throw argument_error("cost_matrix: ortho_tol must be nonnegative");
    const int n = E.n();
    CostMatrix c;
    c.n = n;
    c.raw.resize(n, n);
    c.sym.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            c.raw(i, j) = log_abs(E.u[i].dot(E.v[j]), ortho_tol);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double a = c.raw(i, j), b = c.raw(j, i);
            c.sym(i, j) = (is_neg_inf(a) || is_neg_inf(b)) ? NEG_INF : 0.5 * (a + b);
        }
    return c;
}

// Multiplies every u_i by c > 0; shifts the rate by log c at every p.
inline RankOneEnsemble scale_ensemble(const RankOneEnsemble& E, double c) {
    if (!(c > 0.0)) throw argument_error("scale_ensemble: scale factor must be positive");
    RankOneEnsemble out = E;
    for (auto& ui : out.u) ui *= c;
    return out;
}

// Replaces (u_i, v_i) by (alpha u_i, v_i / alpha): the same matrix, so every
// cost quadratic form value is unchanged. Index is 0-based.
inline RankOneEnsemble rescale_decomposition(const RankOneEnsemble& E, int i, double alpha) {
    if (i < 0 || i >= E.n())
        throw argument_error("rescale_decomposition: index out of range");
    if (alpha == 0.0) throw argument_error("rescale_decomposition: alpha must be nonzero");
    RankOneEnsemble out = E;
    out.u[i] *= alpha;
    out.v[i] /= alpha;
    return out;
}

// Deterministic standard-normal ensemble: entries drawn pair by pair, u
// before v, components in ascending order, from SplitMix64(seed).
inline RankOneEnsemble random_ensemble(int n, int d, std::uint64_t seed) {
    if (n < 1 || d < 1) throw argument_error("random_ensemble: n and d must be >= 1");
    SplitMix64 g(seed);
    RankOneEnsemble E;
    E.d = d;
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd ui(d), vi(d);
        for (int t = 0; t < d; ++t) ui(t) = g.next_gaussian();
        for (int t = 0; t < d; ++t) vi(t) = g.next_gaussian();
        E.u.push_back(std::move(ui));
        E.v.push_back(std::move(vi));
    }
    return E;
}

}  // namespace lyap
