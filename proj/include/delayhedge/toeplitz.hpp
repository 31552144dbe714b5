// SPDX-License-Identifier: Apache-2.0
#pragma once

// The symmetric Toeplitz matrix A_ij = b_|i-j| (b_0 = a + 1) behind the optimal hedge, its
// D-banded inverse from the v-vector, and its closed-form determinant.

#include <cmath>
#include <span>
#include <vector>

#include "delayhedge/dense.hpp"
#include "delayhedge/errors.hpp"
#include "delayhedge/solver.hpp"

namespace delayhedge {

class SymToeplitz {
public:
    SymToeplitz() = default;
    explicit SymToeplitz(std::vector<double> first_row) : row_(std::move(first_row)) {}

    std::size_t size() const { return row_.size(); }
    std::span<const double> first_row() const { return row_; }
    double operator()(std::size_t i, std::size_t j) const { return row_[i > j ? i - j : j - i]; }

    DenseMatrix to_dense() const {
        const std::size_t n = size();
        DenseMatrix m(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i, j) = (*this)(i, j);
        return m;
    }

    double quadratic_form(std::span<const double> x) const {
        const std::size_t n = size();
        if (x.size() != n) throw LengthMismatch(n, x.size());
        double diag = 0.0;
        for (double xi : x) diag += xi * xi;
        double off = 0.0;
        for (std::size_t k = 1; k < n; ++k) {
            double lag = 0.0;
            for (std::size_t i = k; i < n; ++i) lag += x[i] * x[i - k];
            off += row_[k] * lag;
        }
        return row_[0] * diag + 2.0 * off;
    }

private:
    std::vector<double> row_;
};

/// First row (a + 1, b_1, ..., b_{n-1}).
inline SymToeplitz build_A(const HedgeSolution& sol, int n) {
    if (n < 1) throw DomainError("n must be >= 1");
    if (sol.b.size() + 1 < static_cast<std::size_t>(n))
        throw LengthMismatch(static_cast<std::size_t>(n - 1), sol.b.size());
    std::vector<double> row(static_cast<std::size_t>(n));
    row[0] = sol.a + 1.0;
    for (int i = 1; i < n; ++i) row[i] = sol.b[i - 1];
    return SymToeplitz(std::move(row));
}

/// A for an arbitrary admissible root a (b from the recursion).
inline SymToeplitz build_A(double a, int delay, int n) {
    if (n < 1) throw DomainError("n must be >= 1");
    HedgeSolution sol;
    sol.a = a;
    if (n > 1) sol.b = weights_b(delay, a, n - 1);
    return build_A(sol, n);
}

inline void require_admissible(double a, int delay, int n) {
    if (delay < 0 || delay >= n) throw DomainError("delay must satisfy 0 <= D < n");
    if (!(a > -1.0 / (delay + 1.0))) throw DomainError("root must exceed -1/(D+1)");
}

/// v with sum_j v_j b_|i-j| = delta_i0.
inline std::vector<double> v_vector(double a, int delay, int n) {
    require_admissible(a, delay, n);
    const double den = a * (delay + 1.0) + 1.0;
    std::vector<double> v(static_cast<std::size_t>(n), 0.0);
    v[0] = (a * delay + 1.0) / den;
    for (int j = 1; j <= delay; ++j) v[j] = -a / den;
    return v;
}

/// A^{-1} from the v-vector:
///   [A^-1]_ij = (sum_{k=1}^{i^j} v_{i-k} v_{j-k} - sum_{k=1}^{i^j-1} v_{n-i+k} v_{n-j+k}) / v_0
/// (1-based i, j). Both sums are filled along diagonals, each entry from its upper-left
/// neighbour, so the cost is O(n^2).
inline DenseMatrix inverse_via_v(double a, int delay, int n) {
    const auto v = v_vector(a, delay, n);
    const auto N = static_cast<std::size_t>(n);
    DenseMatrix inv(N);
    // 0-based (r, c) <-> 1-based (r+1, c+1); the running sums live in `inv` until scaled.
    for (std::size_t c = 0; c < N; ++c) {
        // walk the diagonal starting at (0, c) and its mirror
        double s1 = 0.0;
        double s2 = 0.0;
        for (std::size_t r = 0; r + c < N; ++r) {
            const std::size_t i = r + 1;      // 1-based row
            const std::size_t j = r + c + 1;  // 1-based column, j >= i
            s1 += v[i - 1] * v[j - 1];
            if (i >= 2) s2 += v[N - i + 1] * v[N - j + 1];
            const double e = (s1 - s2) / v[0];
            inv(r, r + c) = e;
            inv(r + c, r) = e;
        }
    }
    return inv;
}

/// |A| = (1 + (D+1)a)^{n-D} / (1 + Da)^{n-D-1}.
inline double det_closed_form(double a, int delay, int n) {
    require_admissible(a, delay, n);
    return std::exp(static_cast<double>(n - delay) * std::log1p((delay + 1.0) * a) -
                    static_cast<double>(n - delay - 1) * std::log1p(delay * a));
}

inline double log_det_closed_form(double a, int delay, int n) {
    require_admissible(a, delay, n);
    return static_cast<double>(n - delay) * std::log1p((delay + 1.0) * a) -
           static_cast<double>(n - delay - 1) * std::log1p(delay * a);
}

/// True iff every entry more than `delay` off the diagonal is at most tol * max|M_ij|.
inline bool check_banded(const DenseMatrix& m, int delay, double tol) {
    const double bound = tol * m.max_abs();
    const std::size_t n = m.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t gap = i > j ? i - j : j - i;
            if (gap > static_cast<std::size_t>(delay) && std::abs(m(i, j)) > bound) return false;
        }
    return true;
}

/// Largest |M_ij| outside the band, relative to max|M_ij|.
inline double band_leakage(const DenseMatrix& m, int delay) {
    double worst = 0.0;
    const std::size_t n = m.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t gap = i > j ? i - j : j - i;
            if (gap > static_cast<std::size_t>(delay)) worst = std::max(worst, std::abs(m(i, j)));
        }
    const double scale = m.max_abs();
    return scale > 0.0 ? worst / scale : 0.0;
}

namespace detail {

template <class Visit>
void for_each_subset(std::size_t n, std::size_t k, Visit&& visit) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    if (k == 0 || k > n) return;
    while (true) {
        visit(idx);
        std::size_t p = k;
        while (p-- > 0) {
            if (idx[p] < n - k + p) break;
            if (p == 0) return;
        }
        ++idx[p];
        for (std::size_t q = p + 1; q < k; ++q) idx[q] = idx[q - 1] + 1;
    }
}

}  // namespace detail

/// Largest |A^I_J| over the (D+1)x(D+1) minors with i_1 > j_{D+1} - D, each relative to its
/// Hadamard bound (product of the sub-matrix row norms).
inline double worst_lower_minor(const SymToeplitz& a, int delay) {
    const std::size_t n = a.size();
    if (n > 12) throw SizeError("minor enumeration is limited to n <= 12");
    if (delay < 0 || static_cast<std::size_t>(delay) >= n) throw DomainError("delay must be < n");
    const std::size_t k = static_cast<std::size_t>(delay) + 1;
    double worst = 0.0;
    DenseMatrix sub(k);
    detail::for_each_subset(n, k, [&](const std::vector<std::size_t>& rows) {
        detail::for_each_subset(n, k, [&](const std::vector<std::size_t>& cols) {
            // 0-based form of i_1 > j_{D+1} - D
            if (rows.front() + static_cast<std::size_t>(delay) <= cols.back()) return;
            double hadamard = 1.0;
            for (std::size_t r = 0; r < k; ++r) {
                double norm2 = 0.0;
                for (std::size_t c = 0; c < k; ++c) {
                    sub(r, c) = a(rows[r], cols[c]);
                    norm2 += sub(r, c) * sub(r, c);
                }
                hadamard *= std::sqrt(norm2);
            }
            if (hadamard == 0.0) return;
            worst = std::max(worst, std::abs(dense_det(sub)) / hadamard);
        });
    });
    return worst;
}

inline bool check_vanishing_minors(const SymToeplitz& a, int delay, double tol = 1e-9) {
    return worst_lower_minor(a, delay) <= tol;
}

}  // namespace delayhedge
