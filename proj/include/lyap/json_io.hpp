#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "lyap/analysis.hpp"
#include "lyap/ensemble.hpp"
#include "lyap/errors.hpp"
#include "lyap/extended_real.hpp"
#include "lyap/simplex.hpp"

namespace lyap {

using ordered_json = nlohmann::ordered_json;

// NEG_INF has no JSON number; it is serialized as the string "-inf".
inline ordered_json json_real(double x) {
    if (is_neg_inf(x)) return ordered_json("-inf");
    return ordered_json(x);
}

inline ordered_json json_vector(const std::vector<double>& v) {
    ordered_json a = ordered_json::array();
    for (double x : v) a.push_back(json_real(x));
    return a;
}

inline ordered_json json_vector(const Eigen::VectorXd& v) {
    ordered_json a = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(json_real(v(i)));
    return a;
}

inline ordered_json json_matrix(const Eigen::MatrixXd& M) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(json_real(M(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

// Node and matrix indices are 0-based in the API and 1-based in emitted JSON.
inline ordered_json json_indices_1based(const std::vector<int>& idx) {
    ordered_json a = ordered_json::array();
    for (int v : idx) a.push_back(v + 1);
    return a;
}

inline ordered_json json_triples_1based(const std::vector<std::array<int, 3>>& ts) {
    ordered_json a = ordered_json::array();
    for (const auto& t : ts) a.push_back({t[0] + 1, t[1] + 1, t[2] + 1});
    return a;
}

inline ordered_json ensemble_to_json(const RankOneEnsemble& E) {
    ordered_json mats = ordered_json::array();
    for (int i = 0; i < E.n(); ++i) {
        ordered_json m;
        m["u"] = json_vector(E.u[i]);
        m["v"] = json_vector(E.v[i]);
        mats.push_back(std::move(m));
    }
    ordered_json out;
    out["d"] = E.d;
    out["matrices"] = std::move(mats);
    return out;
}

// Row-major JSON matrix: an array of equal-length rows of finite reals.
inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const std::string& what) {
    if (!j.is_array() || j.empty())
        throw parse_error(what + ": expected a nonempty array of rows");
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    Eigen::MatrixXd M;
    for (std::size_t i = 0; i < rows; ++i) {
        const auto& row = j[i];
        if (!row.is_array() || row.empty())
            throw parse_error(what + ": row " + std::to_string(i + 1) +
                              " is not a nonempty array");
        if (i == 0) {
            cols = row.size();
            M.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        } else if (row.size() != cols) {
            throw parse_error(what + ": row " + std::to_string(i + 1) +
                              " has inconsistent length");
        }
        for (std::size_t k = 0; k < cols; ++k) {
            if (!row[k].is_number())
                throw parse_error(what + ": entry at row " + std::to_string(i + 1) +
                                  ", column " + std::to_string(k + 1) + " is not a number");
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                row[k].get<double>();
        }
    }
    return M;
}

// Mixture file: {"components": [{"weight": w, "dist": [reals]} ...]}.
// Weights form a distribution over components; each dist must have the
// ensemble's length and sum to 1 within 1e-6 (then renormalized).
inline MixturePlan mixture_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("components") || !j["components"].is_array() ||
        j["components"].empty())
        throw parse_error("mixture: expected {\"components\": [...]} with at least one entry");
    std::vector<double> weights;
    std::vector<SimplexPoint> comps;
    for (const auto& c : j["components"]) {
        if (!c.is_object() || !c.contains("weight") || !c["weight"].is_number() ||
            !c.contains("dist") || !c["dist"].is_array())
            throw parse_error("mixture: each component needs a numeric \"weight\" and a \"dist\" array");
        weights.push_back(c["weight"].get<double>());
        std::vector<double> d;
        for (const auto& x : c["dist"]) {
            if (!x.is_number()) throw parse_error("mixture: dist entries must be numbers");
            d.push_back(x.get<double>());
        }
        double s = 0.0;
        for (double x : d) s += x;
        if (std::abs(s - 1.0) > 1e-6)
            throw parse_error("mixture: component dist sums to " + std::to_string(s) +
                              ", expected 1 within 1e-6");
        comps.emplace_back(d);
    }
    double ws = 0.0;
    for (double w : weights) ws += w;
    if (std::abs(ws - 1.0) > 1e-6)
        throw parse_error("mixture: weights sum to " + std::to_string(ws) +
                          ", expected 1 within 1e-6");
    return MixturePlan(SimplexPoint(weights), std::move(comps));
}

}  // namespace lyap
