// SPDX-License-Identifier: Apache-2.0
#pragma once

// Small dense row-major matrices. This is the substrate of the oracles that the structured
// Toeplitz routines are checked against, so it is plain O(n^3) elimination on purpose.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "delayhedge/errors.hpp"

namespace delayhedge {

class DenseMatrix {
public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t size() const { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }
    std::span<const double> data() const { return data_; }

    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    double trace() const {
        double t = 0.0;
        for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
        return t;
    }

    double sum() const {
        double s = 0.0;
        for (double v : data_) s += v;
        return s;
    }

    DenseMatrix& operator*=(double s) {
        for (double& v : data_) v *= s;
        return *this;
    }

    friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
        const std::size_t n = a.n_;
        DenseMatrix c(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) {
                const double aik = a(i, k);
                for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    std::vector<double> apply(std::span<const double> x) const {
        std::vector<double> y(n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) y[i] += (*this)(i, j) * x[j];
        return y;
    }

    /// x' M x
    double quadratic_form(std::span<const double> x) const {
        double q = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            double r = 0.0;
            for (std::size_t j = 0; j < n_; ++j) r += (*this)(i, j) * x[j];
            q += x[i] * r;
        }
        return q;
    }

    /// One row per line, entries "%.17g".
    void write_csv(std::ostream& os) const {
        char buf[32];
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) {
                std::snprintf(buf, sizeof buf, "%.17g", (*this)(i, j));
                if (j) os << ',';
                os << buf;
            }
            os << '\n';
        }
    }

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

namespace detail {

struct LuFactors {
    DenseMatrix lu;
    std::vector<std::size_t> perm;
    int sign = 1;
};

// Partial pivoting; throws on an exactly or numerically singular pivot.
inline LuFactors lu_decompose(const DenseMatrix& m) {
    const std::size_t n = m.size();
    LuFactors f{m, std::vector<std::size_t>(n), 1};
    for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;
    const double scale = std::max(m.max_abs(), 1e-300);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(f.lu(i, k)) > std::abs(f.lu(p, k))) p = i;
        if (std::abs(f.lu(p, k)) <= 1e-14 * scale) throw SingularMatrix("matrix is singular");
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(f.lu(k, j), f.lu(p, j));
            std::swap(f.perm[k], f.perm[p]);
            f.sign = -f.sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double l = f.lu(i, k) / f.lu(k, k);
            f.lu(i, k) = l;
            for (std::size_t j = k + 1; j < n; ++j) f.lu(i, j) -= l * f.lu(k, j);
        }
    }
    return f;
}

}  // namespace detail

inline double dense_det(const DenseMatrix& m) {
    if (m.size() == 0) return 1.0;
    detail::LuFactors f;
    try {
        f = detail::lu_decompose(m);
    } catch (const SingularMatrix&) {
        return 0.0;
    }
    double d = f.sign;
    for (std::size_t i = 0; i < m.size(); ++i) d *= f.lu(i, i);
    return d;
}

inline DenseMatrix dense_inverse(const DenseMatrix& m) {
    const std::size_t n = m.size();
    const auto f = detail::lu_decompose(m);
    DenseMatrix inv(n);
    std::vector<double> col(n);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t i = 0; i < n; ++i) col[i] = f.perm[i] == c ? 1.0 : 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < i; ++k) col[i] -= f.lu(i, k) * col[k];
        for (std::size_t i = n; i-- > 0;) {
            for (std::size_t k = i + 1; k < n; ++k) col[i] -= f.lu(i, k) * col[k];
            col[i] /= f.lu(i, i);
        }
        for (std::size_t i = 0; i < n; ++i) inv(i, c) = col[i];
    }
    return inv;
}

/// Lower Cholesky factor of a symmetric matrix, or nullopt if it is not positive definite.
inline std::optional<DenseMatrix> cholesky(const DenseMatrix& m) {
    const std::size_t n = m.size();
    DenseMatrix l(n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = m(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0)) return std::nullopt;
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = m(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

inline double cholesky_log_det(const DenseMatrix& l) {
    double s = 0.0;
    for (std::size_t i = 0; i < l.size(); ++i) s += std::log(l(i, i));
    return 2.0 * s;
}

/// Solves (L L') x = b.
inline std::vector<double> cholesky_solve(const DenseMatrix& l, std::span<const double> b) {
    const std::size_t n = l.size();
    std::vector<double> x(b.begin(), b.end());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k) x[i] -= l(i, k) * x[k];
        x[i] /= l(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t k = i + 1; k < n; ++k) x[i] -= l(k, i) * x[k];
        x[i] /= l(i, i);
    }
    return x;
}

}  // namespace delayhedge
