// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include <gtest/gtest.h>

#include "delayhedge/errors.hpp"
#include "delayhedge/market.hpp"

using namespace delayhedge;

namespace {

std::string domain_message(const DiscreteMarket& m) {
    try {
        validate_discrete(m);
    } catch (const DomainError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Market, AcceptsValidMarket) { EXPECT_NO_THROW(validate_discrete({4, 1, 0.0, 1.0, 1.0, 0.0})); }

TEST(Market, RejectsDelayAtHorizon) {
    EXPECT_EQ(domain_message({4, 4, 0.0, 1.0, 1.0, 0.0}), "delay must be < n");
}

TEST(Market, RejectsZeroSigmaHat) {
    EXPECT_EQ(domain_message({4, 1, 0.0, 1.0, 0.0, 0.0}), "sigma_hat must be positive");
}

TEST(Market, RejectsBadInputs) {
    EXPECT_THROW(validate_discrete({0, 0, 0.0, 1.0, 1.0, 0.0}), DomainError);
    EXPECT_THROW(validate_discrete({3, -1, 0.0, 1.0, 1.0, 0.0}), DomainError);
    EXPECT_THROW(validate_discrete({3, 0, 0.0, -1.0, 1.0, 0.0}), DomainError);
    EXPECT_THROW(validate_discrete({3, 0, NAN, 1.0, 1.0, 0.0}), DomainError);
    EXPECT_THROW(validate_discrete({3, 0, 0.0, 1.0, INFINITY, 0.0}), DomainError);
}

TEST(Discretize, ExactMultipleOfH) {
    const auto m = discretize({Delay(0.2), 0.0, 1.0, 1.0, 0.0}, 10);
    EXPECT_EQ(m.n, 10);
    EXPECT_EQ(m.delay, 2);
    EXPECT_EQ(m.mu, 0.0);
    EXPECT_DOUBLE_EQ(m.sigma, 1.0 / std::sqrt(10.0));
    EXPECT_DOUBLE_EQ(m.sigma_hat, 1.0 / std::sqrt(10.0));
}

TEST(Discretize, RoundsUp) { EXPECT_EQ(discretize({Delay(0.21), 0.0, 1.0, 1.0, 0.0}, 10).delay, 3); }

TEST(Discretize, FullDelayRejected) {
    EXPECT_THROW(discretize({Delay(1.0), 0.0, 1.0, 1.0, 0.0}, 10), DomainError);
}

TEST(Discretize, DriftScales) {
    const auto m = discretize({Delay(0.25), 0.8, 2.0, 1.0, 0.0}, 16);
    EXPECT_DOUBLE_EQ(m.mu, 0.05);
    EXPECT_DOUBLE_EQ(m.sigma, 0.5);
    EXPECT_EQ(m.delay, 4);
}

TEST(Discretize, DelayWithinOneStep) {
    for (const char* h : {"0.2", "0.21", "0.333", "0.05", "0.7", "0.999", "1e-2", "0.125"}) {
        const Delay H = Delay::parse(h);
        for (int n = 2; n <= 400; ++n) {
            const long d = H.steps(n);
            EXPECT_GE(static_cast<double>(d) / n, H.value() - 1e-15) << h << " n=" << n;
            EXPECT_LE(static_cast<double>(d) / n - H.value(), 1.0 / n + 1e-15) << h << " n=" << n;
        }
    }
}

TEST(Delay, ParsesExactly) {
    const auto h = Delay::parse("0.20");
    EXPECT_EQ(h.numerator(), 1);
    EXPECT_EQ(h.denominator(), 5);
    EXPECT_EQ(Delay::parse("2.5e-1").denominator(), 4);
    EXPECT_EQ(Delay::parse("1").numerator(), 1);
    EXPECT_EQ(Delay::parse(".5").denominator(), 2);
    EXPECT_EQ(Delay(0.1).denominator(), 10);
}

TEST(Delay, CeilingAtMultiples) {
    // 0.1 * 30 is 3.0000000000000004 in binary floating point
    EXPECT_EQ(Delay::parse("0.1").steps(30), 3);
    EXPECT_EQ(Delay::parse("0.3").steps(10), 3);
    EXPECT_EQ(Delay::parse("0.7").steps(10), 7);
    EXPECT_EQ(Delay::parse("0.2").pieces(), 5);
    EXPECT_EQ(Delay::parse("0.21").pieces(), 5);
    EXPECT_EQ(Delay::parse("0.35").pieces(), 3);
}

TEST(Delay, RejectsGarbage) {
    for (const char* bad : {"", "abc", "0.2x", "1e", "--1", "0.1.2"})
        EXPECT_THROW(Delay::parse(bad), DomainError) << bad;
}
