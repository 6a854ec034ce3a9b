#pragma once

#include <cmath>

#include "lyap/errors.hpp"

namespace lyap {

inline constexpr double EULER_GAMMA = 0.57721566490153286061;

// Digamma at half-integer arguments z = two_z / 2 via the exact closed
// forms: Psi(m) = -gamma + sum_{k=1}^{m-1} 1/k and
// Psi(m + 1/2) = -gamma - 2 log 2 + 2 sum_{k=1}^{m} 1/(2k - 1).
// Sums run in ascending k for reproducible rounding.
inline double digamma_half_integer(long long two_z) {
    if (two_z < 1) throw argument_error("digamma_half_integer: argument must be >= 1/2");
    if (two_z % 2 == 0) {
        const long long m = two_z / 2;
        double s = 0.0;
        for (long long k = 1; k < m; ++k) s += 1.0 / static_cast<double>(k);
        return -EULER_GAMMA + s;
    }
    const long long m = (two_z - 1) / 2;
    double s = 0.0;
    for (long long k = 1; k <= m; ++k) s += 1.0 / static_cast<double>(2 * k - 1);
    return -EULER_GAMMA - 2.0 * std::log(2.0) + 2.0 * s;
}

// Rate of products of random projections u_t u_{t+1}^T with u_t uniform on
// the unit sphere in R^d: exact value -(Psi(d/2) + gamma + log 4)/2, and the
// large-d expansion -(log d + gamma + log 2)/2 (off by O(1/d)).
struct SphereResult {
    int d = 0;
    double exact_value = 0.0;
    double asymptotic_value = 0.0;
};

inline SphereResult sphere_lyapunov(int d) {
    if (d < 2) throw argument_error("sphere_lyapunov: dimension must be >= 2");
    SphereResult r;
    r.d = d;
    r.exact_value =
        -(digamma_half_integer(d) + EULER_GAMMA + 2.0 * std::log(2.0)) / 2.0;
    r.asymptotic_value =
        -(std::log(static_cast<double>(d)) + EULER_GAMMA + std::log(2.0)) / 2.0;
    return r;
}

}  // namespace lyap
