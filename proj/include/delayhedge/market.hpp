// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <string>
#include <string_view>

#include "delayhedge/errors.hpp"

namespace delayhedge {

/// Delay of the continuous model as an exact decimal fraction num/den in (0, 1].
///
/// Holding the delay exactly lets the number of delayed steps ceil(H*n) be computed in
/// integer arithmetic, so H = 0.2, n = 10 gives 2 and not 3.
class Delay {
public:
    Delay() = default;

    /// Nearest 15-significant-digit decimal to `h`.
    explicit Delay(double h) {
        if (!std::isfinite(h)) throw DomainError("delay must be finite");
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.15g", h);
        *this = parse(buf);
    }

    /// Parses "0.2", "1", ".35", "2.5e-1".
    static Delay parse(std::string_view text) {
        std::int64_t mantissa = 0;
        int scale = 0;
        bool digits = false;
        bool dot = false;
        std::size_t i = 0;
        if (i < text.size() && text[i] == '+') ++i;
        for (; i < text.size(); ++i) {
            char ch = text[i];
            if (ch >= '0' && ch <= '9') {
                if (mantissa > (INT64_MAX - 9) / 10) throw DomainError("delay has too many digits");
                mantissa = mantissa * 10 + (ch - '0');
                digits = true;
                if (dot) ++scale;
            } else if (ch == '.' && !dot) {
                dot = true;
            } else {
                break;
            }
        }
        if (!digits) throw DomainError("cannot parse delay '" + std::string(text) + "'");
        if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
            ++i;
            int sign = 1;
            if (i < text.size() && (text[i] == '+' || text[i] == '-')) sign = text[i++] == '-' ? -1 : 1;
            int exponent = 0;
            bool exp_digits = false;
            for (; i < text.size() && text[i] >= '0' && text[i] <= '9'; ++i) {
                exponent = exponent * 10 + (text[i] - '0');
                exp_digits = true;
                if (exponent > 40) throw DomainError("delay exponent out of range");
            }
            if (!exp_digits) throw DomainError("cannot parse delay '" + std::string(text) + "'");
            scale -= sign * exponent;
        }
        if (i != text.size()) throw DomainError("cannot parse delay '" + std::string(text) + "'");
        while (scale < 0) {
            if (mantissa > INT64_MAX / 10) throw DomainError("delay out of range");
            mantissa *= 10;
            ++scale;
        }
        if (scale > 18) throw DomainError("delay has too many decimal places");
        std::int64_t den = 1;
        for (int k = 0; k < scale; ++k) den *= 10;
        Delay d;
        std::int64_t g = std::gcd(mantissa, den);
        d.num_ = g == 0 ? 0 : mantissa / g;
        d.den_ = g == 0 ? 1 : den / g;
        return d;
    }

    std::int64_t numerator() const { return num_; }
    std::int64_t denominator() const { return den_; }
    double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    /// ceil(H * n), exact.
    std::int64_t steps(std::int64_t n) const {
        __extension__ typedef __int128 wide;
        wide p = static_cast<wide>(num_) * n;
        wide q = p / den_;
        if (q * den_ < p) ++q;
        return static_cast<std::int64_t>(q);
    }

    /// ceil(1 / H), exact.
    std::int64_t pieces() const { return (den_ + num_ - 1) / num_; }

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

/// n-step market with i.i.d. Normal(mu, sigma^2) increments, a delay of `delay` steps and a
/// static pricing law Normal(s0, n * sigma_hat^2) for options on S_n.
struct DiscreteMarket {
    int n = 1;
    int delay = 0;
    double mu = 0.0;
    double sigma = 1.0;
    double sigma_hat = 1.0;
    double s0 = 0.0;
};

/// Bachelier market on [0, 1] with drift theta, volatility varsigma, information delay H and
/// static pricing law Normal(p0, varsigma_hat^2).
struct ContinuousMarket {
    Delay H{0.2};
    double theta = 0.0;
    double varsigma = 1.0;
    double varsigma_hat = 1.0;
    double p0 = 0.0;
};

inline const DiscreteMarket& validate_discrete(const DiscreteMarket& m) {
    std::string why;
    if (m.n < 1) why = "n must be >= 1";
    else if (m.delay < 0) why = "delay must be >= 0";
    else if (m.delay >= m.n) why = "delay must be < n";
    else if (!(m.sigma > 0.0) || !std::isfinite(m.sigma)) why = "sigma must be positive";
    else if (!(m.sigma_hat > 0.0) || !std::isfinite(m.sigma_hat)) why = "sigma_hat must be positive";
    else if (!std::isfinite(m.mu)) why = "mu must be finite";
    else if (!std::isfinite(m.s0)) why = "s0 must be finite";
    if (!why.empty()) throw DomainError(why);
    return m;
}

inline const ContinuousMarket& validate_continuous(const ContinuousMarket& c) {
    std::string why;
    if (c.H.numerator() <= 0 || c.H.numerator() > c.H.denominator()) why = "H must lie in (0, 1]";
    else if (!(c.varsigma > 0.0) || !std::isfinite(c.varsigma)) why = "varsigma must be positive";
    else if (!(c.varsigma_hat > 0.0) || !std::isfinite(c.varsigma_hat))
        why = "varsigma_hat must be positive";
    else if (!std::isfinite(c.theta)) why = "theta must be finite";
    if (!why.empty()) throw DomainError(why);
    return c;
}

/// Number of delayed steps D_n = ceil(H n) on an n-point grid.
inline int delay_steps(const Delay& H, int n) { return static_cast<int>(H.steps(n)); }

/// The n-step market sampled from `c` on the grid {0, 1/n, ..., 1}.
inline DiscreteMarket discretize(const ContinuousMarket& c, int n) {
    validate_continuous(c);
    if (n < 2) throw DomainError("discretization needs n >= 2");
    const int d = delay_steps(c.H, n);
    if (d >= n) throw DomainError("delay must be < n (ceil(H*n) = " + std::to_string(d) + ")");
    const double root_n = std::sqrt(static_cast<double>(n));
    DiscreteMarket m{n, d, c.theta / n, c.varsigma / root_n, c.varsigma_hat / root_n, c.p0};
    return validate_discrete(m);
}

}  // namespace delayhedge
