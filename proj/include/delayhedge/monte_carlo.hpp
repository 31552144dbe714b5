// SPDX-License-Identifier: Apache-2.0
#pragma once

// Seeded simulation of the discretized market and empirical utility of a strategy.
//
// Draws come from Philox4x32-10 (counter-based, one stream per path) pushed through the
// inverse normal CDF, so a path depends only on (seed, path index) and not on thread count.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "delayhedge/errors.hpp"
#include "delayhedge/gaussian.hpp"
#include "delayhedge/market.hpp"
#include "delayhedge/solver.hpp"

namespace delayhedge {

/// Philox4x32 with 10 rounds, as in Random123.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Block apply(Block ctr, Key key) {
        for (int r = 0; r < 10; ++r) {
            if (r) {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }
};

/// Uniform in (0, 1) from the top 53 bits of a 64-bit word.
inline double unit_open(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

inline double normal_quantile(double u) {
    return boost::math::quantile(boost::math::normal_distribution<double>(), u);
}

/// Standard normal draw `index` of stream `stream` under `seed`.
inline double standard_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    const Philox4x32::Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    const std::uint64_t block = index / 2;
    const auto out = Philox4x32::apply({static_cast<std::uint32_t>(block),
                                        static_cast<std::uint32_t>(block >> 32),
                                        static_cast<std::uint32_t>(stream),
                                        static_cast<std::uint32_t>(stream >> 32)},
                                       key);
    const std::size_t half = index % 2 == 0 ? 0 : 2;
    const std::uint64_t bits = (std::uint64_t{out[half]} << 32) | out[half + 1];
    return normal_quantile(unit_open(bits));
}

struct PathBatch {
    int n = 0;
    std::size_t count = 0;
    std::uint64_t seed = 0;
    std::vector<double> increments;  ///< row-major count x n

    std::span<const double> path(std::size_t p) const {
        return {increments.data() + p * static_cast<std::size_t>(n), static_cast<std::size_t>(n)};
    }
};

namespace detail {

inline unsigned clamp_threads(unsigned threads, std::size_t work) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(work, 1)));
}

/// fn(p) for p in [0, count), split into contiguous chunks.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    threads = clamp_threads(threads, count);
    if (threads <= 1) {
        for (std::size_t p = 0; p < count; ++p) fn(p);
        return;
    }
    std::vector<std::jthread> pool;
    const std::size_t chunk = (count + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t p = lo; p < hi; ++p) fn(p);
        });
    }
}

}  // namespace detail

/// Sum in a fixed binary tree; the result depends only on the input order.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline PathBatch generate(const DiscreteMarket& m, std::size_t count, std::uint64_t seed,
                          unsigned threads = 1) {
    validate_discrete(m);
    if (count < 1) throw DomainError("need at least one path");
    PathBatch b{m.n, count, seed, std::vector<double>(count * static_cast<std::size_t>(m.n))};
    detail::parallel_for(count, threads, [&](std::size_t p) {
        for (int i = 0; i < m.n; ++i)
            b.increments[p * static_cast<std::size_t>(m.n) + static_cast<std::size_t>(i)] =
                m.mu + m.sigma * standard_normal(seed, p, static_cast<std::uint64_t>(i));
    });
    return b;
}

struct UtilityReport {
    double empirical_mean = 0.0;  ///< mean of -exp(-V)
    double std_error = 0.0;
    std::optional<double> analytic;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
    double effective_sample_size = 0.0;  ///< (sum e^{-V})^2 / sum e^{-2V}
};

/// Empirical E[-exp(-V)] of a strategy over a batch; `analytic` is filled with the closed-form
/// expectation when it exists.
inline UtilityReport estimate_utility(const PathBatch& batch, const StrategyWeights& w,
                                      const DiscreteMarket& m, unsigned threads = 1) {
    if (batch.n != m.n)
        throw LengthMismatch(static_cast<std::size_t>(m.n), static_cast<std::size_t>(batch.n));
    std::vector<double> weight(batch.count);
    detail::parallel_for(batch.count, threads, [&](std::size_t p) {
        weight[p] = std::exp(-evaluate_on_path(w, m, batch.path(p)).terminal_value);
    });
    std::vector<double> squares(batch.count);
    for (std::size_t p = 0; p < batch.count; ++p) squares[p] = weight[p] * weight[p];
    const double total = pairwise_sum(weight);
    const double total_sq = pairwise_sum(squares);
    const double count = static_cast<double>(batch.count);
    const double mean = total / count;
    std::vector<double> dev(batch.count);
    for (std::size_t p = 0; p < batch.count; ++p) dev[p] = (weight[p] - mean) * (weight[p] - mean);
    const double var = batch.count > 1 ? pairwise_sum(dev) / (count - 1.0) : 0.0;

    UtilityReport r;
    r.empirical_mean = -mean;
    r.std_error = std::sqrt(var / count);
    r.n_paths = batch.count;
    r.seed = batch.seed;
    r.effective_sample_size = total_sq > 0.0 ? total * total / total_sq : 0.0;
    try {
        r.analytic = analytic_quadratic_utility(quadratic_payoff(w, m), m);
    } catch (const IntegrabilityError&) {
        r.analytic.reset();
    }
    return r;
}

}  // namespace delayhedge
