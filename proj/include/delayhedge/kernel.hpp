// SPDX-License-Identifier: Apache-2.0
#pragma once

// Continuous-time limit of the delayed hedge: the constant alpha, the strategy kernel kappa on
// [0, 1] (solution of kappa_t = alpha * int_{t-H}^t kappa_s ds with kappa = alpha/(1 - alpha H)
// on [0, H)), and the limiting value and static leg.

#include <algorithm>
#include <cmath>
#include <vector>

#include "delayhedge/errors.hpp"
#include "delayhedge/market.hpp"

namespace delayhedge {

namespace detail {

/// ceil(x), snapping to the nearest integer when x is within rounding of it.
inline long ceil_snapped(double x) {
    const double r = std::nearbyint(x);
    if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<long>(r);
    return static_cast<long>(std::ceil(x));
}

inline long floor_snapped(double x) {
    const double r = std::nearbyint(x);
    if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<long>(r);
    return static_cast<long>(std::floor(x));
}

}  // namespace detail

/// alpha(H, varsigma, varsigma_hat) = (1/H) (1 - 2 / (x + sqrt(x^2 + y))),
/// x = H rho, y = 4 (1 - H) rho, rho = varsigma^2 / varsigma_hat^2.
///
/// Evaluated through the conjugate 1 - 2/s = 4(rho - 1) / (s (sqrt(x^2 + y) + 2 - x)), which is
/// exactly zero at rho = 1 and has no cancellation near it.
inline double alpha(double H, double varsigma, double varsigma_hat) {
    if (!(H > 0.0 && H <= 1.0)) throw DomainError("H must lie in (0, 1]");
    if (!(varsigma > 0.0) || !(varsigma_hat > 0.0)) throw DomainError("volatilities must be positive");
    const double q = varsigma / varsigma_hat;
    const double rho = q * q;
    const double x = H * rho;
    const double root = std::sqrt(x * x + 4.0 * (1.0 - H) * rho);
    const double s = x + root;
    return 4.0 * (rho - 1.0) / (H * s * (root + 2.0 - x));
}

/// c_1 = -alpha, c_{k+1} = e^{alpha H} sum_{j=0}^{k-1} c_{k-j} (-alpha H)^j / j!; returns c_1..c_count.
inline std::vector<double> c_coefficients(double alpha_value, double H, long count) {
    if (!(H > 0.0 && H <= 1.0)) throw DomainError("H must lie in (0, 1]");
    if (count < 1) throw DomainError("need at least one coefficient");
    std::vector<double> c(static_cast<std::size_t>(count));
    c[0] = -alpha_value;
    const double grow = std::exp(alpha_value * H);
    const double z = -alpha_value * H;
    for (long k = 1; k < count; ++k) {
        double sum = 0.0;
        double term = 1.0;  // z^j / j!
        for (long j = 0; j < k; ++j) {
            sum += c[static_cast<std::size_t>(k - 1 - j)] * term;
            term *= z / static_cast<double>(j + 1);
        }
        c[static_cast<std::size_t>(k)] = grow * sum;
    }
    return c;
}

/// c_1..c_K with K = ceil(1/H).
inline std::vector<double> c_coefficients(double alpha_value, double H) {
    if (!(H > 0.0 && H <= 1.0)) throw DomainError("H must lie in (0, 1]");
    return c_coefficients(alpha_value, H, detail::ceil_snapped(1.0 / H));
}

struct KernelSpec {
    double alpha = 0.0;
    double H = 1.0;
    long K = 1;  ///< ceil(1/H): number of delay intervals covering [0, 1]
    std::vector<double> c;

    /// kappa on [0, H)
    double level() const { return alpha / (1.0 - alpha * H); }
};

inline KernelSpec make_kernel_spec(double H, double varsigma, double varsigma_hat) {
    KernelSpec s;
    s.alpha = alpha(H, varsigma, varsigma_hat);
    s.H = H;
    s.K = detail::ceil_snapped(1.0 / H);
    s.c = c_coefficients(s.alpha, H, s.K);
    if (!(1.0 - s.alpha * H > 0.0)) throw NumericalError("1 - alpha H must be positive");
    return s;
}

inline KernelSpec make_kernel_spec(const ContinuousMarket& m) {
    validate_continuous(m);
    KernelSpec s;
    s.H = m.H.value();
    s.alpha = alpha(s.H, m.varsigma, m.varsigma_hat);
    s.K = m.H.pieces();
    s.c = c_coefficients(s.alpha, s.H, s.K);
    if (!(1.0 - s.alpha * s.H > 0.0)) throw NumericalError("1 - alpha H must be positive");
    return s;
}

/// The closed form valid on [kH, (k+1)H], evaluated at t (k = 0 is the constant level).
inline double kappa_piece(double t, long k, const KernelSpec& spec) {
    if (k <= 0) return spec.level();
    const double s = t - static_cast<double>(k) * spec.H;
    const double z = -spec.alpha * s;
    double sum = 0.0;
    double term = 1.0;  // z^j / j!
    for (long j = 0; j < k; ++j) {
        sum += spec.c[static_cast<std::size_t>(k - j - 1)] * term;
        term *= z / static_cast<double>(j + 1);
    }
    return spec.level() + std::exp(spec.alpha * s) * sum;
}

/// Index of the delay interval holding t >= H; t = 1 with 1/H integral maps to the last one.
inline long kappa_piece_index(double t, const KernelSpec& spec) {
    const long k = detail::floor_snapped(t / spec.H);
    return std::clamp(k, 1L, spec.K - 1 < 1 ? 1L : spec.K - 1);
}

inline double kappa(double t, const KernelSpec& spec) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("kappa is defined on [0, 1]");
    if (t < spec.H) return spec.level();
    return kappa_piece(t, kappa_piece_index(t, spec), spec);
}

/// Weight of the Volterra strategy at lag u: kappa_u - alpha/(1 - alpha H). Zero for u < H.
inline double gamma_kernel(double u, const KernelSpec& spec) {
    if (!(u >= 0.0 && u <= 1.0)) throw DomainError("lag must lie in [0, 1]");
    if (u < spec.H) return 0.0;
    return kappa(u, spec) - spec.level();
}

/// Composite Simpson integral of kappa over [lo, hi] where kappa is smooth on piece k.
inline double integrate_piece(double lo, double hi, long k, const KernelSpec& spec, long panels) {
    if (hi <= lo) return 0.0;
    panels = std::max(panels, 1L);
    const double h = (hi - lo) / static_cast<double>(panels);
    double acc = 0.0;
    for (long p = 0; p < panels; ++p) {
        const double x0 = lo + static_cast<double>(p) * h;
        const double x1 = p + 1 == panels ? hi : x0 + h;
        acc += (x1 - x0) / 6.0 *
               (kappa_piece(x0, k, spec) + 4.0 * kappa_piece(0.5 * (x0 + x1), k, spec) +
                kappa_piece(x1, k, spec));
    }
    return acc;
}

/// Calls fn(x, y, k) for consecutive sub-intervals [x, y] of [lo, hi] cut at every multiple of
/// H, where k is the delay interval whose closed form is valid on [x, y].
template <class Fn>
void for_each_smooth_segment(double lo, double hi, const KernelSpec& spec, Fn&& fn) {
    double x = lo;
    for (long j = static_cast<long>(std::floor(lo / spec.H)) + 1; x < hi; ++j) {
        const double y = std::min(hi, static_cast<double>(j) * spec.H);
        if (y <= x) continue;
        const double mid = 0.5 * (x + y);
        const long k = mid < spec.H ? 0 : kappa_piece_index(mid, spec);
        fn(x, y, k);
        x = y;
    }
}

/// Integral of kappa over [lo, hi] within [0, 1], about `quadsteps` Simpson panels per delay
/// interval.
inline double integrate_kappa(double lo, double hi, const KernelSpec& spec, long quadsteps) {
    double acc = 0.0;
    for_each_smooth_segment(lo, hi, spec, [&](double x, double y, long k) {
        const long panels = std::max(
            2L, static_cast<long>(std::ceil(static_cast<double>(quadsteps) * (y - x) / spec.H)));
        acc += integrate_piece(x, y, k, spec, panels);
    });
    return acc;
}

/// kappa_t - alpha * int_{t-H}^t kappa_s ds, with about `quadsteps` Simpson panels per delay
/// interval.
inline double kappa_integral_residual(double t, const KernelSpec& spec, long quadsteps) {
    if (!(t >= spec.H - 1e-15 && t <= 1.0)) throw DomainError("residual needs H <= t <= 1");
    if (spec.alpha == 0.0) return 0.0;
    const double lo = std::max(0.0, t - spec.H);
    return kappa(std::max(t, spec.H), spec) - spec.alpha * integrate_kappa(lo, t, spec, quadsteps);
}

/// Limit of the n-step optimal values.
inline double limit_value(const ContinuousMarket& c) {
    const auto spec = make_kernel_spec(c);
    const double a = spec.alpha;
    const double H = spec.H;
    const double q = c.varsigma_hat / c.varsigma;
    const double drift = c.theta / c.varsigma;
    return -std::exp(0.5 * (-drift * drift + a * (q * q / (1.0 - a * H) + H - 1.0))) *
           std::sqrt(1.0 - a * H);
}

/// Limit coefficient of (P_1 - P_0)^2 in the static leg.
inline double limit_static_coeff(const ContinuousMarket& c) {
    const auto spec = make_kernel_spec(c);
    return spec.alpha / (2.0 * c.varsigma * c.varsigma * (1.0 - spec.alpha * spec.H));
}

}  // namespace delayhedge
