// SPDX-License-Identifier: Apache-2.0
#pragma once

// Derivative-free search over quadratic static legs and linear delayed-feedback strategies,
// used as an optimality oracle for the explicit hedge on tiny markets.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "delayhedge/errors.hpp"
#include "delayhedge/gaussian.hpp"
#include "delayhedge/market.hpp"

namespace delayhedge {

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
/// Stops when the simplex value spread falls below ftol.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> start, double step, double ftol,
                                    int max_iter) {
    const std::size_t dim = start.size();
    std::vector<std::vector<double>> simplex(dim + 1, start);
    for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += step;
    std::vector<double> values(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) values[i] = f(simplex[i]);

    std::vector<std::size_t> order(dim + 1);
    NelderMeadResult res;
    for (int it = 0; it < max_iter; ++it) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](auto l, auto r) { return values[l] < values[r]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[dim - 1];
        res.iterations = it;
        if (std::abs(values[worst] - values[best]) <= ftol) {
            res.converged = true;
            break;
        }
        std::vector<double> centroid(dim, 0.0);
        for (std::size_t k = 0; k < dim; ++k)
            for (std::size_t i = 0; i < dim; ++i) centroid[i] += simplex[order[k]][i] / dim;
        auto along = [&](double t) {
            std::vector<double> p(dim);
            for (std::size_t i = 0; i < dim; ++i)
                p[i] = centroid[i] + t * (simplex[worst][i] - centroid[i]);
            return p;
        };
        auto reflected = along(-1.0);
        const double fr = f(reflected);
        if (fr < values[best]) {
            auto expanded = along(-2.0);
            const double fe = f(expanded);
            if (fe < fr) {
                simplex[worst] = std::move(expanded);
                values[worst] = fe;
            } else {
                simplex[worst] = std::move(reflected);
                values[worst] = fr;
            }
        } else if (fr < values[second]) {
            simplex[worst] = std::move(reflected);
            values[worst] = fr;
        } else {
            auto contracted = fr < values[worst] ? along(-0.5) : along(0.5);
            const double fc = f(contracted);
            if (fc < std::min(fr, values[worst])) {
                simplex[worst] = std::move(contracted);
                values[worst] = fc;
            } else {
                for (std::size_t k = 1; k <= dim; ++k) {
                    auto& p = simplex[order[k]];
                    for (std::size_t i = 0; i < dim; ++i)
                        p[i] = simplex[best][i] + 0.5 * (p[i] - simplex[best][i]);
                    values[order[k]] = f(p);
                }
            }
        }
    }
    const auto best = static_cast<std::size_t>(
        std::min_element(values.begin(), values.end()) - values.begin());
    res.x = simplex[best];
    res.fx = values[best];
    return res;
}

struct BruteForceResult {
    double value = 0.0;
    /// [q, g_1..g_n, h_ij for i = 1..n, j = 1..i-1-D]; the linear term of f is pinned at 0.
    std::vector<double> params;
};

/// Optimum of E[-exp(-V)] over f(s) = q (s - s0)^2 and gamma_i = g_i + sum_{j <= i-1-D} h_ij x_j,
/// with each candidate scored by the closed-form Gaussian expectation.
inline BruteForceResult brute_force_optimum(const DiscreteMarket& m) {
    validate_discrete(m);
    if (m.n > 3) throw SizeError("brute-force optimum supports n <= 3");
    const int n = m.n;
    std::vector<std::pair<int, int>> feedback;  // 0-based (i, j) with j <= i - 1 - D
    for (int i = 0; i < n; ++i)
        for (int j = 0; j + m.delay < i; ++j) feedback.emplace_back(i, j);
    const std::size_t dim = 1 + static_cast<std::size_t>(n) + feedback.size();

    auto payoff = [&](const std::vector<double>& p) {
        const auto N = static_cast<std::size_t>(n);
        QuadraticPayoff v{DenseMatrix(N, 2.0 * p[0]), std::vector<double>(N),
                          -p[0] * n * m.sigma_hat * m.sigma_hat};
        for (std::size_t i = 0; i < N; ++i) v.linear[i] = p[1 + i];
        for (std::size_t k = 0; k < feedback.size(); ++k) {
            const auto [i, j] = feedback[k];
            v.Q(i, j) += p[1 + N + k];
            v.Q(j, i) += p[1 + N + k];
        }
        return v;
    };
    auto objective = [&](const std::vector<double>& p) {
        try {
            return log_exp_moment(payoff(p), m);
        } catch (const IntegrabilityError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    std::vector<double> x(dim, 0.0);
    double fx = objective(x);
    bool converged = false;
    // restarts shake the simplex out of premature collapse
    for (int round = 0; round < 12; ++round) {
        auto r = nelder_mead(objective, x, round == 0 ? 0.25 : 0.05, 1e-15, 20000);
        const double improvement = fx - r.fx;
        x = r.x;
        fx = r.fx;
        if (r.converged && round > 0 && improvement < 1e-13) {
            converged = true;
            break;
        }
    }
    if (!converged || !std::isfinite(fx)) throw OptimizerFailure("Nelder-Mead did not settle");
    return {-std::exp(fx), x};
}

}  // namespace delayhedge
