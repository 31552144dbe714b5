// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "delayhedge/solver.hpp"
#include "delayhedge/toeplitz.hpp"
#include "delayhedge/verify.hpp"
#include "support.hpp"

using namespace delayhedge;

namespace {

double max_gap(const DenseMatrix& m, const ref::LMat& r) {
    double g = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j)
            g = std::max(g, static_cast<double>(std::fabs(m(i, j) - r[i][j])));
    return g;
}

}  // namespace

TEST(BuildA, IdentityAtZero) {
    const auto A = build_A(0.0, 3, 7).to_dense();
    EXPECT_EQ(max_gap(A, ref::to_long(DenseMatrix::identity(7))), 0.0);
}

TEST(BuildA, NoDelayScalar) {
    const DiscreteMarket m{6, 0, 0.0, 1.0, 2.0, 0.0};
    const auto A = build_A(solve(m), m.n).to_dense();
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) EXPECT_EQ(A(i, j), i == j ? 0.25 : 0.0);
}

TEST(BuildA, UnitDelayGeometricTail) {
    const DiscreteMarket m{5, 1, 0.0, 1.0, std::sqrt(2.0), 0.0};
    const double a = solve_a(m);
    const auto A = build_A(a, 1, 5);
    EXPECT_DOUBLE_EQ(A(0, 0), a + 1.0);
    EXPECT_DOUBLE_EQ(A(0, 1), a);
    for (std::size_t k = 1; k < 5; ++k) EXPECT_NEAR(A(0, k), a * std::pow(a / (a + 1), k - 1.0), 1e-16);
    EXPECT_EQ(A(3, 1), A(1, 3));
}

TEST(InverseViaV, TrivialCases) {
    EXPECT_EQ(max_gap(inverse_via_v(0.0, 2, 6), ref::to_long(DenseMatrix::identity(6))), 0.0);
    const auto inv = inverse_via_v(0.6, 0, 4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(inv(i, j), i == j ? 1.0 / 1.6 : 0.0, 1e-16);
}

TEST(InverseViaV, MatchesGaussJordan) {
    const DiscreteMarket m{6, 2, 0.0, 1.0, 0.8, 0.0};
    const double a = solve_a(m);
    const auto gj = ref::gauss_jordan(ref::toeplitz_A(a, 2, 6));
    EXPECT_LT(max_gap(inverse_via_v(a, 2, 6), gj.inverse), 1e-12);
}

TEST(InverseViaV, GridAgainstGaussJordan) {
    for (const auto& m : default_grid()) {
        const double a = solve_a(m);
        const auto gj = ref::gauss_jordan(ref::toeplitz_A(a, m.delay, m.n));
        double scale = 0.0;
        for (const auto& row : gj.inverse)
            for (auto v : row) scale = std::max(scale, static_cast<double>(std::fabs(v)));
        EXPECT_LT(max_gap(inverse_via_v(a, m.delay, m.n), gj.inverse) / scale, 1e-9)
            << m.n << " " << m.delay << " " << m.sigma_hat;
        EXPECT_NEAR(det_closed_form(a, m.delay, m.n) / static_cast<double>(gj.det), 1.0, 1e-9);
    }
}

TEST(InverseViaV, RejectsInadmissibleRoot) {
    EXPECT_THROW(inverse_via_v(-0.5, 1, 5), DomainError);
    EXPECT_THROW(inverse_via_v(-2.0, 0, 5), DomainError);
}

TEST(DetClosedForm, Cases) {
    EXPECT_EQ(det_closed_form(0.0, 3, 9), 1.0);
    // no delay: (sigma^2 / sigma_hat^2)^n
    const double a = solve_a({5, 0, 0.0, 1.0, 1.25, 0.0});
    EXPECT_NEAR(det_closed_form(a, 0, 5), std::pow(0.64, 5), 1e-15);
    const auto gj = ref::gauss_jordan(ref::toeplitz_A(0.3, 2, 6));
    EXPECT_NEAR(det_closed_form(0.3, 2, 6) / static_cast<double>(gj.det), 1.0, 1e-12);
    EXPECT_NEAR(log_det_closed_form(0.3, 2, 6), std::log(static_cast<double>(gj.det)), 1e-12);
}

TEST(CheckBanded, Cases) {
    EXPECT_TRUE(check_banded(DenseMatrix::identity(5), 0, 1e-12));
    const DiscreteMarket m{8, 2, 0.0, 1.0, 1.4, 0.0};
    const double a = solve_a(m);
    const auto A = build_A(a, 2, 8).to_dense();
    EXPECT_TRUE(check_banded(dense_inverse(A), 2, 1e-9));
    EXPECT_FALSE(check_banded(A, 2, 1e-9));
    EXPECT_FALSE(check_banded(dense_inverse(A), 1, 1e-9));
}

TEST(Minors, IdentityVanishes) { EXPECT_TRUE(check_vanishing_minors(build_A(0.0, 2, 7), 2)); }

TEST(Minors, OptimalMatrixVanishes) { EXPECT_TRUE(check_vanishing_minors(build_A(0.5, 1, 6), 1)); }

TEST(Minors, PerturbationDetected) {
    const auto A = build_A(0.5, 1, 6);
    std::vector<double> row(A.first_row().begin(), A.first_row().end());
    row[3] += 0.01;
    EXPECT_FALSE(check_vanishing_minors(SymToeplitz(row), 1));
}

TEST(Minors, GridUpToTwelve) {
    for (const auto& m : default_grid(3)) {
        const double a = solve_a(m);
        EXPECT_TRUE(check_vanishing_minors(build_A(a, m.delay, m.n), m.delay))
            << m.n << " " << m.delay << " " << m.sigma_hat;
    }
}

TEST(Minors, SizeLimit) { EXPECT_THROW(worst_lower_minor(build_A(0.1, 1, 13), 1), SizeError); }

TEST(Dense, Inverses) {
    const auto I = DenseMatrix::identity(4);
    EXPECT_EQ(max_gap(dense_inverse(I), ref::to_long(I)), 0.0);
    EXPECT_EQ(dense_det(I), 1.0);
    DenseMatrix d(2);
    d(0, 0) = 2.0;
    d(1, 1) = 2.0;
    EXPECT_EQ(dense_inverse(d)(0, 0), 0.5);
    EXPECT_EQ(dense_inverse(d)(0, 1), 0.0);
    EXPECT_EQ(dense_det(d), 4.0);
}

TEST(Dense, RandomSpdResidual) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> z;
    DenseMatrix g(5);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) g(i, j) = z(rng);
    DenseMatrix spd(5);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) {
            double s = i == j ? 0.5 : 0.0;
            for (std::size_t k = 0; k < 5; ++k) s += g(i, k) * g(j, k);
            spd(i, j) = s;
        }
    const auto prod = spd * dense_inverse(spd);
    EXPECT_LT(max_gap(prod, ref::to_long(DenseMatrix::identity(5))), 1e-10);
    const auto l = cholesky(spd);
    ASSERT_TRUE(l.has_value());
    EXPECT_NEAR(cholesky_log_det(*l), std::log(dense_det(spd)), 1e-10);
}

TEST(Dense, Singular) {
    DenseMatrix s(3, 1.0);
    EXPECT_EQ(dense_det(s), 0.0);
    EXPECT_THROW(dense_inverse(s), SingularMatrix);
    EXPECT_FALSE(cholesky(s).has_value());
}
