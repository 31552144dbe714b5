// SPDX-License-Identifier: Apache-2.0
#pragma once

// Closed-form E_P[-exp(-V)] for V quadratic in the increments X ~ N(mu 1, sigma^2 I).

#include <cmath>
#include <span>
#include <vector>

#include "delayhedge/dense.hpp"
#include "delayhedge/errors.hpp"
#include "delayhedge/market.hpp"
#include "delayhedge/solver.hpp"

namespace delayhedge {

/// V(x) = 0.5 x'Qx + linear'x + constant
struct QuadraticPayoff {
    DenseMatrix Q;
    std::vector<double> linear;
    double constant = 0.0;

    double operator()(std::span<const double> x) const {
        double v = 0.5 * Q.quadratic_form(x) + constant;
        for (std::size_t i = 0; i < x.size(); ++i) v += linear[i] * x[i];
        return v;
    }
};

/// Terminal value of a (kernel, static leg, merton) strategy written as a quadratic form.
inline QuadraticPayoff quadratic_payoff(const StrategyWeights& w, const DiscreteMarket& m) {
    const auto n = static_cast<std::size_t>(m.n);
    if (w.kernel.size() + 1 < n) throw LengthMismatch(n - 1, w.kernel.size());
    QuadraticPayoff p{DenseMatrix(n, 2.0 * w.static_coeff), std::vector<double>(n, w.merton),
                      -w.static_coeff * m.n * m.sigma_hat * m.sigma_hat};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) {
            p.Q(i, j) += w.kernel[i - j - 1];
            p.Q(j, i) += w.kernel[i - j - 1];
        }
    return p;
}

/// log E_P[exp(-V)].
///
/// With x = mu 1 + sigma z the exponent is -0.5 z'Mz - g'z - V(mu 1), M = I + sigma^2 Q and
/// g = sigma (Q mu 1 + linear), so the expectation is |M|^{-1/2} exp(0.5 g'M^{-1}g - V(mu 1)).
/// Throws IntegrabilityError when M is not positive definite.
inline double log_exp_moment(const QuadraticPayoff& p, const DiscreteMarket& m) {
    const std::size_t n = p.Q.size();
    if (p.linear.size() != n) throw LengthMismatch(n, p.linear.size());
    if (n != static_cast<std::size_t>(m.n)) throw LengthMismatch(static_cast<std::size_t>(m.n), n);
    const double s2 = m.sigma * m.sigma;
    DenseMatrix M = p.Q;
    M *= s2;
    for (std::size_t i = 0; i < n; ++i) M(i, i) += 1.0;
    const auto chol = cholesky(M);
    if (!chol) throw IntegrabilityError("I + sigma^2 Q is not positive definite");
    const std::vector<double> mean(n, m.mu);
    auto g = p.Q.apply(mean);
    for (std::size_t i = 0; i < n; ++i) g[i] = m.sigma * (g[i] + p.linear[i]);
    const auto y = cholesky_solve(*chol, g);
    double gy = 0.0;
    for (std::size_t i = 0; i < n; ++i) gy += g[i] * y[i];
    return -0.5 * cholesky_log_det(*chol) + 0.5 * gy - p(mean);
}

/// E_P[-exp(-V)] in closed form.
inline double analytic_quadratic_utility(const DenseMatrix& Q, std::span<const double> linear,
                                         double constant, const DiscreteMarket& m) {
    QuadraticPayoff p{Q, std::vector<double>(linear.begin(), linear.end()), constant};
    return -std::exp(log_exp_moment(p, m));
}

inline double analytic_quadratic_utility(const QuadraticPayoff& p, const DiscreteMarket& m) {
    return -std::exp(log_exp_moment(p, m));
}

}  // namespace delayhedge
