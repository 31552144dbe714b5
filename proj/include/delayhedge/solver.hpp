// SPDX-License-Identifier: Apache-2.0
#pragma once

// Explicit optimal semistatic hedge for the n-step Gaussian market with a D-step delay.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "delayhedge/errors.hpp"
#include "delayhedge/market.hpp"

namespace delayhedge {

/// qa z^2 + qb z + qc = 0, whose largest root is the static-option root a.
struct QuadraticCoeffs {
    double qa = 0.0;
    double qb = 0.0;
    double qc = 0.0;

    double operator()(double z) const { return (qa * z + qb) * z + qc; }
    double scale() const { return std::max({std::abs(qa), std::abs(qb), std::abs(qc)}); }
};

inline QuadraticCoeffs quadratic_coeffs(const DiscreteMarket& m) {
    const double d = m.delay;
    const double ratio = (m.sigma * m.sigma) / (m.sigma_hat * m.sigma_hat);
    return {d * (d + 1.0), 2.0 * d + 1.0 - d * (d + 1.0) * ratio / m.n, 1.0 - ratio};
}

/// Root a of the hedging problem, from the explicit largest-root formula.
///
/// The discriminant is non-negative in exact arithmetic; values down to -1e-12 (relative to
/// qb^2) are treated as rounding and clamped, anything below throws NumericalError.
inline double solve_a(const DiscreteMarket& m) {
    validate_discrete(m);
    const double ratio = (m.sigma * m.sigma) / (m.sigma_hat * m.sigma_hat);
    if (m.delay == 0) return ratio - 1.0;
    const auto q = quadratic_coeffs(m);
    // sigma == sigma_hat: the roots are 0 and -qb/qa < 0.
    if (q.qc == 0.0) return 0.0;
    const double d = m.delay;
    double disc = q.qb * q.qb - 4.0 * q.qa * q.qc;
    if (disc < 0.0) {
        if (disc < -1e-12 * std::max(1.0, q.qb * q.qb))
            throw NumericalError("negative discriminant in the root equation");
        disc = 0.0;
    }
    return ratio / (2.0 * m.n) + (std::sqrt(disc) - 2.0 * d - 1.0) / (2.0 * d * (d + 1.0));
}

/// b_1..b_count: b_1 = ... = b_D = a, then b_i = a/(aD+1) * (b_{i-1} + ... + b_{i-D}).
/// All zeros when D = 0.
inline std::vector<double> weights_b(int delay, double a, int count) {
    if (count < 1) throw DomainError("count must be >= 1");
    if (delay < 0) throw DomainError("delay must be >= 0");
    std::vector<double> b(static_cast<std::size_t>(count), 0.0);
    if (delay == 0) return b;
    if (!(a > -1.0 / (delay + 1.0))) throw DomainError("root must exceed -1/(D+1)");
    const double r = a / (a * delay + 1.0);
    const int head = std::min(delay, count);
    std::fill_n(b.begin(), head, a);
    double window = a * delay;  // b_{i-1} + ... + b_{i-D}
    for (int i = delay; i < count; ++i) {
        b[i] = r * window;
        window += b[i] - b[i - delay];
    }
    return b;
}

inline std::vector<double> weights_b(const DiscreteMarket& m, double a, int count) {
    return weights_b(m.delay, a, count);
}

/// log(-u) for the optimal value u < 0.
inline double log_neg_value(const DiscreteMarket& m, double a) {
    const double n = m.n;
    const double d = m.delay;
    const double s2 = m.sigma * m.sigma;
    const double h2 = m.sigma_hat * m.sigma_hat;
    return n * (a * h2 - m.mu * m.mu) / (2.0 * s2) +
           0.5 * ((n - d - 1.0) * std::log1p(d * a) - (n - d) * std::log1p((d + 1.0) * a));
}

/// Optimal value u(n, D, mu, sigma, sigma_hat) of E[-exp(-V)].
inline double value(const DiscreteMarket& m) { return -std::exp(log_neg_value(m, solve_a(m))); }

struct HedgeSolution {
    double a = 0.0;
    std::vector<double> b;  ///< b_1..b_{n-1}
    double static_coeff = 0.0;  ///< f*(s) = static_coeff * (s - s0)^2
    double merton = 0.0;
    double value = 0.0;
};

inline HedgeSolution solve(const DiscreteMarket& m) {
    HedgeSolution s;
    s.a = solve_a(m);
    if (m.n > 1) s.b = weights_b(m, s.a, m.n - 1);
    const double s2 = m.sigma * m.sigma;
    s.static_coeff = s.a / (2.0 * s2);
    s.merton = m.mu / s2;
    s.value = -std::exp(log_neg_value(m, s.a));
    return s;
}

/// gamma_i = merton + sum_{j<i} kernel[i-j-1] * x_j,  f(s) = static_coeff * (s - s0)^2.
///
/// Reported in the canonical representative of its equivalence class: f carries no linear term.
struct StrategyWeights {
    double merton = 0.0;
    std::vector<double> kernel;  ///< w_1..w_{n-1}
    double static_coeff = 0.0;
};

inline StrategyWeights strategy(const DiscreteMarket& m) {
    const auto sol = solve(m);
    const double s2 = m.sigma * m.sigma;
    StrategyWeights w{sol.merton, std::vector<double>(sol.b.size()), sol.static_coeff};
    for (std::size_t j = 0; j < sol.b.size(); ++j) w.kernel[j] = (sol.b[j] - sol.a) / s2;
    return w;
}

/// Strategy with its kernel and static leg rescaled; used to probe optimality.
inline StrategyWeights perturbed(StrategyWeights w, double kernel_scale, double static_scale) {
    for (double& k : w.kernel) k *= kernel_scale;
    w.static_coeff *= static_scale;
    return w;
}

struct PathEvaluation {
    std::vector<double> gammas;
    double terminal_value = 0.0;
};

/// Terminal portfolio value f(S_n) + sum gamma_i X_i - int f dnu_hat along one increment path.
/// int f dnu_hat = static_coeff * n * sigma_hat^2.
inline PathEvaluation evaluate_on_path(const StrategyWeights& w, const DiscreteMarket& m,
                                       std::span<const double> x) {
    const auto n = static_cast<std::size_t>(m.n);
    if (x.size() != n) throw LengthMismatch(n, x.size());
    if (w.kernel.size() + 1 < n) throw LengthMismatch(n - 1, w.kernel.size());
    PathEvaluation out{std::vector<double>(n), 0.0};
    double gains = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double g = w.merton;
        for (std::size_t j = 0; j < i; ++j) g += w.kernel[i - j - 1] * x[j];
        out.gammas[i] = g;
        gains += g * x[i];
        total += x[i];
    }
    const double static_price = w.static_coeff * m.n * m.sigma_hat * m.sigma_hat;
    out.terminal_value = w.static_coeff * total * total + gains - static_price;
    return out;
}

}  // namespace delayhedge
