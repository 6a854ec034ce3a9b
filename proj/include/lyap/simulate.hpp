#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "lyap/analysis.hpp"
#include "lyap/ensemble.hpp"
#include "lyap/errors.hpp"
#include "lyap/extended_real.hpp"
#include "lyap/rng.hpp"
#include "lyap/simplex.hpp"

namespace lyap {

// Monte Carlo estimate of a growth rate. estimate is the arithmetic mean of
// per_trial; if any trajectory annihilates (NEG_INF) the aggregate is
// NEG_INF and std_error is reported as 0.
struct SimulationResult {
    double estimate = 0.0;
    double std_error = 0.0;
    int trials = 0;
    int steps_per_trial = 0;
    std::uint64_t seed = 0;
    std::vector<double> per_trial;  // per-trajectory rates, trial order
};

namespace detail {

inline int draw_index(SplitMix64& g, const std::vector<double>& weights) {
    const double u = g.next_uniform();
    double acc = 0.0;
    const int n = static_cast<int>(weights.size());
    for (int i = 0; i < n; ++i) {
        acc += weights[i];
        if (u < acc) return i;
    }
    return n - 1;  // guard against accumulated rounding
}

inline SimulationResult aggregate(std::vector<double> rates, int k, std::uint64_t seed) {
    SimulationResult r;
    r.trials = static_cast<int>(rates.size());
    r.steps_per_trial = k;
    r.seed = seed;
    r.per_trial = std::move(rates);
    bool annihilated = false;
    double mean = 0.0;
    for (double x : r.per_trial)
        if (is_neg_inf(x)) annihilated = true;
    if (annihilated) {
        r.estimate = NEG_INF;
        r.std_error = 0.0;
        return r;
    }
    for (double x : r.per_trial) mean += x;
    mean /= static_cast<double>(r.trials);
    double var = 0.0;
    for (double x : r.per_trial) var += (x - mean) * (x - mean);
    r.estimate = mean;
    r.std_error = r.trials > 1
                      ? std::sqrt(var / static_cast<double>(r.trials - 1)) /
                            std::sqrt(static_cast<double>(r.trials))
                      : 0.0;
    return r;
}

inline void check_sim_args(const RankOneEnsemble& E, std::size_t dist_len, int k, int trials) {
    if (static_cast<int>(dist_len) != E.n())
        throw argument_error("simulate: distribution length does not match ensemble size");
    if (k < 1) throw argument_error("simulate: steps must be >= 1");
    if (trials < 1) throw argument_error("simulate: trials must be >= 1");
}

}  // namespace detail

// Dense oracle: maintains the explicit d x d product of the sampled
// matrices, renormalizing by the largest absolute entry after each multiply
// and accumulating the logs of the normalizers. Per-trajectory rate is
// (accumulated log + log of the final spectral norm) / k. This touches none
// of the closed-form machinery, which is the point: it independently checks
// the exact formula.
inline SimulationResult simulate_iid_dense(const RankOneEnsemble& E, const SimplexPoint& p,
                                           int k, int trials, std::uint64_t seed) {
    detail::check_sim_args(E, p.size(), k, trials);
    const std::vector<double>& w = p.coords();
    std::vector<double> rates(trials);
    for (int t = 0; t < trials; ++t) {
        SplitMix64 g = trial_stream(seed, static_cast<std::uint64_t>(t));
        Eigen::MatrixXd P = E.matrix(detail::draw_index(g, w));
        double acc = 0.0;
        bool dead = false;
        for (int step = 1; step <= k; ++step) {
            if (step > 1) P = E.matrix(detail::draw_index(g, w)) * P;
            const double m = P.cwiseAbs().maxCoeff();
            if (m == 0.0) {
                dead = true;
                break;
            }
            P /= m;
            acc += std::log(m);
        }
        if (dead) {
            rates[t] = NEG_INF;
            continue;
        }
        const double top = P.jacobiSvd().singularValues()(0);
        rates[t] = top == 0.0 ? NEG_INF : (acc + std::log(top)) / static_cast<double>(k);
    }
    return detail::aggregate(std::move(rates), k, seed);
}

// Telescoped oracle: the product of rank-one factors collapses to scalar
// inner products, so the rate is
// (sum_t log|u_{s_t}^T v_{s_{t+1}}| + log||u_{s_k}|| + log||v_{s_1}||) / k.
// Consumes exactly the same random stream as the dense oracle, so under a
// shared seed the index sequences are identical and per-trajectory rates
// agree to rounding.
inline SimulationResult simulate_iid_telescoped(const RankOneEnsemble& E, const SimplexPoint& p,
                                                int k, int trials, std::uint64_t seed,
                                                double ortho_tol = 0.0) {
    detail::check_sim_args(E, p.size(), k, trials);
    const CostMatrix C = cost_matrix(E, ortho_tol);
    const int n = E.n();
    std::vector<double> log_u_norm(n), log_v_norm(n);
    for (int i = 0; i < n; ++i) {
        log_u_norm[i] = log_abs(E.u[i].norm());
        log_v_norm[i] = log_abs(E.v[i].norm());
    }
    const std::vector<double>& w = p.coords();
    std::vector<double> rates(trials);
    for (int t = 0; t < trials; ++t) {
        SplitMix64 g = trial_stream(seed, static_cast<std::uint64_t>(t));
        int prev = detail::draw_index(g, w);
        const int first = prev;
        double acc = 0.0;
        bool dead = false;
        for (int step = 2; step <= k; ++step) {
            const int cur = detail::draw_index(g, w);
            const double e = C.raw(prev, cur);
            if (is_neg_inf(e)) {
                dead = true;
                break;
            }
            acc += e;
            prev = cur;
        }
        if (dead || is_neg_inf(log_u_norm[prev]) || is_neg_inf(log_v_norm[first])) {
            rates[t] = NEG_INF;
            continue;
        }
        rates[t] = (acc + log_u_norm[prev] + log_v_norm[first]) / static_cast<double>(k);
    }
    return detail::aggregate(std::move(rates), k, seed);
}

// Telescoped rate along a Markov index stream; the initial state is drawn
// from the stationary distribution of Q.
inline SimulationResult simulate_markov(const RankOneEnsemble& E, const MarkovKernel& K,
                                        int k, int trials, std::uint64_t seed,
                                        double ortho_tol = 0.0) {
    if (K.n() != E.n())
        throw argument_error("simulate: kernel size does not match ensemble size");
    if (k < 1) throw argument_error("simulate: steps must be >= 1");
    if (trials < 1) throw argument_error("simulate: trials must be >= 1");
    const CostMatrix C = cost_matrix(E, ortho_tol);
    const Eigen::VectorXd pi = stationary_distribution(K);
    const int n = E.n();
    std::vector<double> pi_w(n);
    for (int i = 0; i < n; ++i) pi_w[i] = pi(i);
    std::vector<std::vector<double>> rows(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) rows[i][j] = K.Q(i, j);
    std::vector<double> log_u_norm(n), log_v_norm(n);
    for (int i = 0; i < n; ++i) {
        log_u_norm[i] = log_abs(E.u[i].norm());
        log_v_norm[i] = log_abs(E.v[i].norm());
    }
    std::vector<double> rates(trials);
    for (int t = 0; t < trials; ++t) {
        SplitMix64 g = trial_stream(seed, static_cast<std::uint64_t>(t));
        int prev = detail::draw_index(g, pi_w);
        const int first = prev;
        double acc = 0.0;
        bool dead = false;
        for (int step = 2; step <= k; ++step) {
            const int cur = detail::draw_index(g, rows[prev]);
            const double e = C.raw(prev, cur);
            if (is_neg_inf(e)) {
                dead = true;
                break;
            }
            acc += e;
            prev = cur;
        }
        rates[t] = (dead || is_neg_inf(log_u_norm[prev]) || is_neg_inf(log_v_norm[first]))
                       ? NEG_INF
                       : (acc + log_u_norm[prev] + log_v_norm[first]) / static_cast<double>(k);
    }
    return detail::aggregate(std::move(rates), k, seed);
}

// Products of projections onto uniformly random directions: draws k+1 unit
// vectors per trajectory (normalized Gaussians) and averages the k
// consecutive log inner products.
inline SimulationResult simulate_sphere(int d, int k, int trials, std::uint64_t seed) {
    if (d < 2) throw argument_error("simulate_sphere: dimension must be >= 2");
    if (k < 1) throw argument_error("simulate: steps must be >= 1");
    if (trials < 1) throw argument_error("simulate: trials must be >= 1");
    std::vector<double> rates(trials);
    for (int t = 0; t < trials; ++t) {
        SplitMix64 g = trial_stream(seed, static_cast<std::uint64_t>(t));
        auto draw_unit = [&](Eigen::VectorXd& x) {
            double norm = 0.0;
            do {
                for (int i = 0; i < d; ++i) x(i) = g.next_gaussian();
                norm = x.norm();
            } while (norm == 0.0);
            x /= norm;
        };
        Eigen::VectorXd prev(d), cur(d);
        draw_unit(prev);
        double acc = 0.0;
        bool dead = false;
        for (int step = 0; step < k; ++step) {
            draw_unit(cur);
            const double e = log_abs(prev.dot(cur));
            if (is_neg_inf(e)) {
                dead = true;
                break;
            }
            acc += e;
            prev.swap(cur);
        }
        rates[t] = dead ? NEG_INF : acc / static_cast<double>(k);
    }
    return detail::aggregate(std::move(rates), k, seed);
}

}  // namespace lyap
