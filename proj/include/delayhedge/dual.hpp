// SPDX-License-Identifier: Apache-2.0
#pragma once

// The dual measure Q-hat: under it the increments are N(0, sigma^2 A^{-1}), and the optimal
// terminal value satisfies V + log(dQ-hat/dP) = C-hat pathwise.

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "delayhedge/dense.hpp"
#include "delayhedge/errors.hpp"
#include "delayhedge/market.hpp"
#include "delayhedge/solver.hpp"
#include "delayhedge/toeplitz.hpp"

namespace delayhedge {

/// Gaussian law of the increments.
struct DualMeasure {
    std::vector<double> mean;
    DenseMatrix covariance;
    double c_hat = 0.0;
};

/// C-hat = n (mu^2 - a sigma_hat^2) / (2 sigma^2) + 0.5 log|A|.
inline double c_hat(const DiscreteMarket& m, double a) {
    return m.n * (m.mu * m.mu - a * m.sigma_hat * m.sigma_hat) / (2.0 * m.sigma * m.sigma) +
           0.5 * log_det_closed_form(a, m.delay, m.n);
}

inline double c_hat(const DiscreteMarket& m) { return c_hat(m, solve_a(m)); }

inline DualMeasure build_dual(const DiscreteMarket& m) {
    const double a = solve_a(m);
    DualMeasure q{std::vector<double>(static_cast<std::size_t>(m.n), 0.0),
                  inverse_via_v(a, m.delay, m.n), c_hat(m, a)};
    q.covariance *= m.sigma * m.sigma;
    return q;
}

/// The market measure P in the same representation (mean mu, covariance sigma^2 I).
inline DualMeasure market_measure(const DiscreteMarket& m) {
    DualMeasure p{std::vector<double>(static_cast<std::size_t>(m.n), m.mu),
                  DenseMatrix::identity(static_cast<std::size_t>(m.n)), 0.0};
    p.covariance *= m.sigma * m.sigma;
    return p;
}

/// E[S_t - S_s | G_s] = 0 for a Gaussian law: zero mean and no covariance between an increment
/// and anything observed more than D steps earlier.
inline bool check_delayed_martingale(const DualMeasure& q, int delay, double tol) {
    const double scale = std::max(q.covariance.max_abs(), 1e-300);
    for (double mu : q.mean)
        if (std::abs(mu) > tol * std::sqrt(scale)) return false;
    return check_banded(q.covariance, delay, tol);
}

/// Var(S_n - S_0) = 1' Sigma 1 must match the static pricing variance n sigma_hat^2.
inline bool check_marginal(const DualMeasure& q, const DiscreteMarket& m, double tol) {
    const double target = m.n * m.sigma_hat * m.sigma_hat;
    return std::abs(q.covariance.sum() - target) <= tol * target;
}

/// V(x) + log dQ-hat/dP (x) - C-hat for the optimal strategy. Zero for every path.
inline double verification_residual(const DiscreteMarket& m, std::span<const double> x) {
    const auto n = static_cast<std::size_t>(m.n);
    if (x.size() != n) throw LengthMismatch(n, x.size());
    const auto sol = solve(m);
    const auto A = build_A(sol, m.n);
    const double s2 = m.sigma * m.sigma;
    const auto w = strategy(m);
    const double v = evaluate_on_path(w, m, x).terminal_value;
    // log N(0, s2 A^{-1})(x) - log N(mu 1, s2 I)(x); the (2 pi s2)^{n/2} factors cancel.
    double centered = 0.0;
    for (double xi : x) centered += (xi - m.mu) * (xi - m.mu);
    const double log_ratio = -0.5 * A.quadratic_form(x) / s2 +
                             0.5 * log_det_closed_form(sol.a, m.delay, m.n) + 0.5 * centered / s2;
    return v + log_ratio - c_hat(m, sol.a);
}

/// KL(N(mean_q, Sigma) || N(mu 1, sigma^2 I)) in closed Gaussian form.
inline double relative_entropy(const DualMeasure& q, const DiscreteMarket& m) {
    const auto chol = cholesky(q.covariance);
    if (!chol) throw NumericalError("dual covariance is not positive definite");
    const double s2 = m.sigma * m.sigma;
    const double n = m.n;
    double shift = 0.0;
    for (double mu : q.mean) shift += (mu - m.mu) * (mu - m.mu);
    return 0.5 * (q.covariance.trace() / s2 + shift / s2 - n + n * std::log(s2) -
                  cholesky_log_det(*chol));
}

}  // namespace delayhedge
