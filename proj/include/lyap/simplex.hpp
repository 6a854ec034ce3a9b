#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "lyap/errors.hpp"
#include "lyap/rng.hpp"

namespace lyap {

// Probability distribution over {0, ..., n-1}. Inputs are normalized on
// construction; negative entries and zero total mass are rejected.
class SimplexPoint {
public:
    explicit SimplexPoint(std::vector<double> p) : p_(std::move(p)) {
        if (p_.empty()) throw argument_error("simplex point: empty vector");
        double sum = 0.0;
        for (std::size_t i = 0; i < p_.size(); ++i) {
            if (!(p_[i] >= 0.0))
                throw argument_error("simplex point: negative mass at entry " +
                                     std::to_string(i + 1));
            sum += p_[i];
        }
        if (sum <= 0.0) throw argument_error("simplex point: zero total mass");
        for (double& x : p_) x /= sum;
    }

    static SimplexPoint vertex(std::size_t n, std::size_t i) {
        std::vector<double> p(n, 0.0);
        p.at(i) = 1.0;
        return SimplexPoint(std::move(p));
    }

    static SimplexPoint uniform(std::size_t n) {
        return SimplexPoint(std::vector<double>(n, 1.0));
    }

    std::size_t size() const { return p_.size(); }
    double operator[](std::size_t i) const { return p_[i]; }
    const std::vector<double>& coords() const { return p_; }

    std::vector<std::size_t> support() const {
        std::vector<std::size_t> s;
        for (std::size_t i = 0; i < p_.size(); ++i)
            if (p_[i] > 0.0) s.push_back(i);
        return s;
    }

private:
    std::vector<double> p_;
};

// Euclidean projection onto the simplex (sort-based). Used by the projected
// gradient refiner; exact zeros in the output are intentional.
inline std::vector<double> project_to_simplex(std::vector<double> v) {
    const std::size_t n = v.size();
    std::vector<double> u(v);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, theta = 0.0;
    std::size_t rho = 0;
    for (std::size_t i = 0; i < n; ++i) {
        css += u[i];
        const double t = (css - 1.0) / static_cast<double>(i + 1);
        if (u[i] - t > 0.0) {
            rho = i;
            theta = t;
        }
    }
    (void)rho;
    for (double& x : v) x = std::max(x - theta, 0.0);
    return v;
}

// Uniform sample from the interior of the simplex (normalized exponentials).
inline std::vector<double> random_interior_point(std::size_t n, SplitMix64& g) {
    std::vector<double> p(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double u = g.next_uniform();
        while (u == 0.0) u = g.next_uniform();
        p[i] = -std::log(u);
        sum += p[i];
    }
    for (double& x : p) x /= sum;
    return p;
}

// Number of grid points with coordinates in (1/k)Z summing to 1, i.e.
// C(k+n-1, n-1), computed in floating point so callers can budget-check
// without overflow.
inline double grid_point_count(std::size_t n, long long k) {
    double c = 1.0;
    for (std::size_t i = 1; i < n; ++i)
        c *= static_cast<double>(k + static_cast<long long>(i)) / static_cast<double>(i);
    return c;
}

// Enumerates all compositions of k into n nonnegative parts in lexicographic
// order (first coordinate ascending). The callback receives the counts; the
// corresponding simplex point is counts/k. Lexicographic order means the
// first point achieving a strict minimum is the lexicographically smallest.
inline void for_each_grid_point(std::size_t n, long long k,
                                const std::function<void(const std::vector<long long>&)>& f) {
    std::vector<long long> c(n, 0);
    const std::size_t last = n - 1;
    std::function<void(std::size_t, long long)> rec = [&](std::size_t pos, long long rem) {
        if (pos == last) {
            c[pos] = rem;
            f(c);
            return;
        }
        for (long long v = 0; v <= rem; ++v) {
            c[pos] = v;
            rec(pos + 1, rem - v);
        }
    };
    rec(0, k);
}

}  // namespace lyap
