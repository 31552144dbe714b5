// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "delayhedge/solver.hpp"
#include "delayhedge/verify.hpp"
#include "support.hpp"

using namespace delayhedge;

TEST(SolveA, NoDelayClosedForm) {
    EXPECT_DOUBLE_EQ(solve_a({4, 0, 0.0, 1.0, 2.0, 0.0}), -0.75);
    EXPECT_DOUBLE_EQ(solve_a({7, 0, 0.3, 2.0, 1.0, 0.0}), 3.0);
}

TEST(SolveA, ZeroWhenVolatilitiesAgree) {
    for (int n : {2, 5, 17})
        for (int d = 0; d < n; d += 2) EXPECT_EQ(solve_a({n, d, 0.4, 1.3, 1.3, 0.0}), 0.0);
}

TEST(SolveA, MatchesStableQuadraticRoot) {
    const DiscreteMarket m{4, 1, 0.0, 1.0, 1.0 / std::sqrt(2.0), 0.0};
    const long double D = m.delay, n = m.n, r = (long double)m.sigma * m.sigma / (m.sigma_hat * m.sigma_hat);
    const double expected = ref::larger_root(D * (D + 1), 2 * D + 1 - D * (D + 1) * r / n, 1 - r);
    EXPECT_NEAR(solve_a(m), expected, 1e-14);
}

TEST(SolveA, RootPropertiesOnGrid) {
    for (const auto& m : default_grid()) {
        const double a = solve_a(m);
        const long double D = m.delay, n = m.n, r = (long double)m.sigma * m.sigma / (m.sigma_hat * m.sigma_hat);
        if (m.delay > 0) {
            const long double qa = D * (D + 1), qb = 2 * D + 1 - D * (D + 1) * r / n, qc = 1 - r;
            const long double res = (qa * a + qb) * a + qc;
            EXPECT_LT(std::fabs(res) / std::max({std::fabs(qa), std::fabs(qb), std::fabs(qc)}), 1e-12L);
            EXPECT_NEAR(a, ref::larger_root(qa, qb, qc), 1e-12 * std::max(1.0, std::abs(a)));
        }
        EXPECT_GT(a, -1.0 / (m.delay + 1.0));
        EXPECT_EQ(sign_of(a), sign_of(m.sigma - m.sigma_hat));
    }
}

TEST(SolveA, ExtremeRatios) {
    // sigma_hat -> 0 pushes a up, sigma_hat -> inf pushes a toward -1/(D+1)
    const double big = solve_a({8, 3, 0.0, 1.0, 1e-4, 0.0});
    EXPECT_TRUE(std::isfinite(big));
    EXPECT_GT(big, 1.0);
    const double small = solve_a({8, 3, 0.0, 1.0, 1e4, 0.0});
    EXPECT_GT(small, -0.25);
    EXPECT_NEAR(small, -0.25, 1e-6);
}

TEST(WeightsB, TrivialCases) {
    for (double b : weights_b(3, 0.0, 10)) EXPECT_EQ(b, 0.0);
    for (double b : weights_b(0, -0.4, 10)) EXPECT_EQ(b, 0.0);
}

TEST(WeightsB, GeometricForUnitDelay) {
    for (double a : {-0.3, 0.2, 1.7}) {
        const auto b = weights_b(1, a, 30);
        for (int i = 1; i <= 30; ++i)
            EXPECT_NEAR(b[i - 1], a * std::pow(a / (a + 1.0), i - 1), 1e-15 * std::abs(a)) << i;
    }
}

TEST(WeightsB, RunningWindowMatchesDirectSums) {
    for (int D : {2, 3, 7})
        for (double a : {-0.1, 0.05, 0.9}) {
            const auto fast = weights_b(D, a, 200);
            const auto slow = ref::b_direct(D, a, 200);
            // the window carries absolute error of order eps |a|
            for (std::size_t i = 0; i < fast.size(); ++i)
                EXPECT_NEAR(fast[i], slow[i], 1e-13 * std::max(std::abs(a), std::abs(slow[i]))) << D << " " << i;
        }
}

TEST(Strategy, MertonOnlyWhenVolatilitiesAgree) {
    const auto w = strategy({6, 2, 0.3, 1.5, 1.5, 0.0});
    EXPECT_DOUBLE_EQ(w.merton, 0.3 / 2.25);
    EXPECT_EQ(w.static_coeff, 0.0);
    for (double k : w.kernel) EXPECT_EQ(k, 0.0);
}

TEST(Strategy, NoDelayStaticLeg) {
    EXPECT_DOUBLE_EQ(strategy({5, 0, 0.0, 1.0, 2.0, 0.0}).static_coeff, -0.375);
}

TEST(Strategy, KernelFromWeights) {
    const DiscreteMarket m{6, 2, 0.0, 1.0, 0.8, 0.0};
    const auto w = strategy(m);
    const double a = solve_a(m);
    const auto b = ref::b_direct(2, a, 5);
    ASSERT_EQ(w.kernel.size(), 5u);
    EXPECT_EQ(w.kernel[0], 0.0);
    EXPECT_EQ(w.kernel[1], 0.0);
    for (std::size_t j = 2; j < 5; ++j) {
        EXPECT_NE(w.kernel[j], 0.0);
        EXPECT_NEAR(w.kernel[j], b[j] - a, 1e-15);
    }
}

TEST(Value, VolatilitiesAgree) {
    for (double mu : {0.0, 0.2, -0.7})
        EXPECT_NEAR(value({9, 3, mu, 1.2, 1.2, 0.0}), -std::exp(-9 * mu * mu / (2 * 1.44)), 1e-15);
}

TEST(Value, NoDelayEntropyForm) {
    const auto g = [](double z) { return z - std::log(z) - 1.0; };
    for (double sh : {0.5, 0.9, 1.7}) {
        const DiscreteMarket m{6, 0, 0.15, 1.1, sh, 0.0};
        const double z = sh * sh / (m.sigma * m.sigma);
        const double expected =
            -std::exp(-m.n * m.mu * m.mu / (2 * m.sigma * m.sigma)) * std::exp(-m.n * g(z) / 2);
        EXPECT_NEAR(value(m) / expected, 1.0, 1e-13) << sh;
    }
}

TEST(Value, MonotoneInSigmaHat) {
    // utility falls as sigma_hat approaches sigma from either side, and -> 0 in both tails
    for (int D : {0, 1, 3}) {
        const DiscreteMarket base{6, D, 0.0, 1.0, 1.0, 0.0};
        double prev = -1.0;
        for (double sh = 1.05; sh < 40.0; sh *= 1.3) {
            auto m = base;
            m.sigma_hat = sh;
            const double u = value(m);
            EXPECT_GE(u, prev) << D << " " << sh;  // -0 once it underflows
            if (u < 0.0) {
                EXPECT_GT(u, prev) << D << " " << sh;
            }
            prev = u;
        }
        EXPECT_GT(prev, -1e-3);
        prev = -1.0;
        for (double sh = 0.95; sh > 1e-7; sh /= 1.3) {
            auto m = base;
            m.sigma_hat = sh;
            const double u = value(m);
            EXPECT_GT(u, prev) << D << " " << sh;
            prev = u;
        }
        EXPECT_GT(prev, -1e-3);
    }
}

TEST(EvaluateOnPath, ZeroPath) {
    const DiscreteMarket m{5, 2, 0.0, 1.0, 1.3, 0.0};
    const auto w = strategy(m);
    const std::vector<double> x(5, 0.0);
    EXPECT_NEAR(evaluate_on_path(w, m, x).terminal_value, -w.static_coeff * 5 * 1.69, 1e-15);
}

TEST(EvaluateOnPath, MertonOnly) {
    const DiscreteMarket m{4, 1, 0.3, 1.0, 1.0, 0.0};
    const std::vector<double> x{0.1, -2.0, 0.7, 1.1};
    EXPECT_NEAR(evaluate_on_path(strategy(m), m, x).terminal_value, 0.3 * (0.1 - 2.0 + 0.7 + 1.1), 1e-15);
}

TEST(EvaluateOnPath, MatchesQuadraticForm) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> z;
    for (const DiscreteMarket& m : {DiscreteMarket{4, 1, 0.1, 1.0, 1.4, 0.0},
                                    DiscreteMarket{9, 3, -0.2, 0.7, 0.5, 0.0}}) {
        const double a = solve_a(m);
        for (int p = 0; p < 20; ++p) {
            std::vector<double> x(static_cast<std::size_t>(m.n));
            for (double& v : x) v = m.mu + m.sigma * z(rng);
            const double v = evaluate_on_path(strategy(m), m, x).terminal_value;
            EXPECT_NEAR(v, ref::optimal_terminal_value(m, a, x), 1e-12 * (1 + std::abs(v)));
        }
    }
}

TEST(EvaluateOnPath, GammasUseOnlyDelayedInformation) {
    const DiscreteMarket m{8, 3, 0.1, 1.0, 0.6, 0.0};
    const auto w = strategy(m);
    std::vector<double> x{0.3, -0.2, 1.0, 0.5, -1.5, 0.2, 0.9, -0.4};
    const auto base = evaluate_on_path(w, m, x).gammas;
    // changing x_j must leave gamma_i untouched for i <= j + D
    for (std::size_t j = 0; j < x.size(); ++j) {
        auto y = x;
        y[j] += 1.0;
        const auto g = evaluate_on_path(w, m, y).gammas;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (i <= j + 3) {
                EXPECT_EQ(g[i], base[i]) << i << " " << j;
            }
    }
}

TEST(EvaluateOnPath, LengthMismatch) {
    const DiscreteMarket m{4, 1, 0.0, 1.0, 1.2, 0.0};
    const std::vector<double> x(3, 0.0);
    EXPECT_THROW(evaluate_on_path(strategy(m), m, x), LengthMismatch);
}
