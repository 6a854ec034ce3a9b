#pragma once

#include <cmath>
#include <initializer_list>
#include <vector>

#include "lyap/ensemble.hpp"

namespace fixtures {

// Symmetric ensemble from a list of u-vectors (v = u).
inline lyap::RankOneEnsemble symmetric(std::initializer_list<std::vector<double>> us) {
    lyap::RankOneEnsemble E;
    E.d = static_cast<int>(us.begin()->size());
    for (const auto& u : us) {
        Eigen::VectorXd x(E.d);
        for (int i = 0; i < E.d; ++i) x(i) = u[i];
        E.u.push_back(x);
        E.v.push_back(x);
    }
    return E;
}

inline lyap::RankOneEnsemble asymmetric(std::initializer_list<std::vector<double>> us,
                                        std::initializer_list<std::vector<double>> vs) {
    lyap::RankOneEnsemble E = symmetric(us);
    E.v.clear();
    for (const auto& v : vs) {
        Eigen::VectorXd x(E.d);
        for (int i = 0; i < E.d; ++i) x(i) = v[i];
        E.v.push_back(x);
    }
    return E;
}

// The three running examples: u1 = (10,1), u2 = (1,10), u3 varies.
inline lyap::RankOneEnsemble example_edge() { return symmetric({{10, 1}, {1, 10}, {8, 8}}); }
inline lyap::RankOneEnsemble example_vertex() { return symmetric({{10, 1}, {1, 10}, {3, 3}}); }
inline lyap::RankOneEnsemble example_interior() { return symmetric({{10, 1}, {1, 10}, {6.5, -3.5}}); }

// {e1 e1^T, e2 e2^T}: the canonical annihilating pair.
inline lyap::RankOneEnsemble ortho_pair() { return symmetric({{1, 0}, {0, 1}}); }

// Reference values, frozen from independent evaluation.
constexpr double LOG_101 = 4.61512051684126;
constexpr double LOG_128 = 4.852030263919617;
constexpr double LOG_20 = 2.995732273553991;
constexpr double LOG_88 = 4.477336814478207;
constexpr double LOG_18 = 2.8903717578961645;
constexpr double LOG_33 = 3.4965075614664802;
constexpr double EDGE_MIN = 3.805426395197625;    // (1/2) log 2020 at (1/2, 1/2, 0)
constexpr double VERTEX_MIN = 2.8903717578961645;   // log 18 at (0, 0, 1)
constexpr double INTERIOR_MIN = 3.772310827413575;    // interior optimum
constexpr double INTERIOR_P1 = 0.1558144;             // optimum coordinates
constexpr double INTERIOR_P2 = 0.37747835;
constexpr double INTERIOR_P3 = 0.46670724;
constexpr double MIX_EDGE_AVG = 4.328728329558621;  // 1/2 EDGE_MIN + 1/2 log 128
constexpr double LOG_6_PLUS_E = 2.1654221804855953;
constexpr double LOG_15_PLUS_E = 2.874596978199212;

}  // namespace fixtures
