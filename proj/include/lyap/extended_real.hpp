#pragma once

#include <cmath>
#include <limits>

namespace lyap {

// Extended reals are plain doubles using IEEE -infinity as the distinguished
// value NEG_INF. IEEE arithmetic already gives NEG_INF + finite = NEG_INF and
// orders NEG_INF below every finite value. The one convention IEEE does not
// supply is 0 * NEG_INF = 0 (zero-probability terms are skipped, not turned
// into NaN); every probability-weighted accumulation must go through
// weighted_term to get that behavior.

inline constexpr double NEG_INF = -std::numeric_limits<double>::infinity();

inline bool is_neg_inf(double x) { return std::isinf(x) && x < 0.0; }

// w * x under the convention 0 * NEG_INF = 0.
inline double weighted_term(double w, double x) {
    return w == 0.0 ? 0.0 : w * x;
}

// log|x|, with |x| <= tol collapsing to NEG_INF. The default tol = 0 maps
// exact zeros only; a positive tol snaps nearly-orthogonal inner products.
inline double log_abs(double x, double tol = 0.0) {
    const double a = std::abs(x);
    return a <= tol ? NEG_INF : std::log(a);
}

}  // namespace lyap
