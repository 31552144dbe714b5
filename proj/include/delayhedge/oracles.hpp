// SPDX-License-Identifier: Apache-2.0
#pragma once

// Independent reference computations used to cross-check the explicit formulas. None of these
// share a code path with the routines they check.

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace delayhedge::oracles {

/// Both real roots of qa z^2 + qb z + qc (qa != 0), larger first, via the cancellation-free
/// q = -(qb + sign(qb) sqrt(disc)) / 2 form.
inline std::pair<double, double> quadratic_roots(double qa, double qb, double qc) {
    const double disc = std::max(0.0, qb * qb - 4.0 * qa * qc);
    const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
    double r1 = q / qa;
    double r2 = q != 0.0 ? qc / q : -qb / qa - r1;
    if (r1 < r2) std::swap(r1, r2);
    return {r1, r2};
}

/// Closed forms of the first ten kernel coefficients c_1..c_10 (k is 1-based).
inline double kernel_coefficient(int k, double alpha, double H) {
    const double E = std::exp(alpha * H);
    const double z = alpha * H;
    const double z2 = z * z, z3 = z2 * z, z4 = z3 * z, z5 = z4 * z, z6 = z5 * z, z7 = z6 * z;
    const double E2 = E * E, E3 = E2 * E, E4 = E3 * E, E5 = E4 * E, E6 = E5 * E, E7 = E6 * E,
                 E8 = E7 * E;
    switch (k) {
        case 1: return -alpha;
        case 2: return -E * alpha;
        case 3: return E * alpha * (z - E);
        case 4: return E * alpha * (-z2 + 4 * E * z - 2 * E2) / 2;
        case 5: return E * (-6 * E3 + (18 * E2 + z * (z - 12 * E)) * z) * alpha / 6;
        case 6:
            return -E * alpha * (z4 - 32 * E * z3 + 108 * E2 * z2 - 96 * z * E3 + 24 * E4) / 24;
        case 7:
            return E * alpha *
                   (-120 * E5 + z * (z4 - 80 * E * z3 + 540 * E2 * z2 - 960 * z * E3 + 600 * E4)) /
                   120;
        case 8:
            return -E * alpha / 720 *
                   (720 * E6 + z * (z5 - 192 * E * z4 + 2430 * E2 * z3 - 7680 * z2 * E3 +
                                    9000 * z * E4 - 4320 * E5));
        case 9:
            return E * alpha / 5040 *
                   (-5040 * E7 + z * (z6 - 448 * E * z5 + 10206 * E2 * z4 - 53760 * z3 * E3 +
                                      105000 * z2 * E4 - 90720 * z * E5 + 35280 * E6));
        case 10:
            return -E * alpha / 40320 *
                   (40320 * E8 + z * (z7 - 1024 * E * z6 + 40824 * E2 * z5 - 344064 * z4 * E3 +
                                      1050000 * z3 * E4 - 1451520 * z2 * E5 + 987840 * z * E6 -
                                      322560 * E7));
        default: throw std::out_of_range("closed forms exist for k = 1..10");
    }
}

/// RK4 solution of kappa'_t = alpha (kappa_t - kappa_{t-H}) on [H, 1], started from
/// kappa_H = alpha * int_0^H level = alpha H level with kappa = level on [0, H). The step is
/// adjusted so that H is an integral number of steps; delayed values between grid nodes are
/// linearly interpolated.
struct DelayOdeSolution {
    double H = 0.0;
    double step = 0.0;
    std::vector<double> values;  ///< kappa at H + i * step

    double time(std::size_t i) const { return H + static_cast<double>(i) * step; }
};

inline DelayOdeSolution solve_delay_ode(double alpha, double H, double requested_step) {
    const double level = alpha / (1.0 - alpha * H);
    const auto per_delay = static_cast<std::size_t>(std::max(1.0, std::round(H / requested_step)));
    const double h = H / static_cast<double>(per_delay);
    const auto steps = static_cast<std::size_t>(std::floor((1.0 - H) / h + 1e-9));
    DelayOdeSolution sol{H, h, std::vector<double>(steps + 1)};
    auto& y = sol.values;
    y[0] = alpha * H * level;
    for (std::size_t i = 0; i < steps; ++i) {
        // step i covers [H + i h, H + (i+1) h]; its lagged window starts at node i - per_delay
        const bool first_interval = i < per_delay;
        const double lag0 = first_interval ? level : y[i - per_delay];
        const double lag1 = first_interval ? level : y[i - per_delay + 1];
        const double lag_mid = 0.5 * (lag0 + lag1);
        const double k1 = alpha * (y[i] - lag0);
        const double k2 = alpha * (y[i] + 0.5 * h * k1 - lag_mid);
        const double k3 = alpha * (y[i] + 0.5 * h * k2 - lag_mid);
        const double k4 = alpha * (y[i] + h * k3 - lag1);
        y[i + 1] = y[i] + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return sol;
}

}  // namespace delayhedge::oracles
