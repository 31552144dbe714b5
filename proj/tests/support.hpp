// SPDX-License-Identifier: Apache-2.0
//
// Reference computations for the test suite. Deliberately naive: long double Gauss-Jordan,
// direct (non-windowed) sums, explicit quadratic forms.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <sys/wait.h>
#include <utility>
#include <vector>

#include "delayhedge/dense.hpp"
#include "delayhedge/market.hpp"

namespace ref {

using LMat = std::vector<std::vector<long double>>;

inline LMat to_long(const delayhedge::DenseMatrix& m) {
    LMat out(m.size(), std::vector<long double>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) out[i][j] = m(i, j);
    return out;
}

struct GaussJordan {
    LMat inverse;
    long double det = 1.0L;
};

// full pivoting
inline GaussJordan gauss_jordan(LMat a) {
    const std::size_t n = a.size();
    LMat inv(n, std::vector<long double>(n, 0.0L));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0L;
    std::vector<std::size_t> colperm(n);
    for (std::size_t i = 0; i < n; ++i) colperm[i] = i;
    long double det = 1.0L;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pr = k, pc = k;
        for (std::size_t i = k; i < n; ++i)
            for (std::size_t j = k; j < n; ++j)
                if (std::fabs(a[i][j]) > std::fabs(a[pr][pc])) pr = i, pc = j;
        if (a[pr][pc] == 0.0L) return {inv, 0.0L};
        if (pr != k) std::swap(a[pr], a[k]), std::swap(inv[pr], inv[k]), det = -det;
        if (pc != k) {
            for (auto& row : a) std::swap(row[pc], row[k]);
            std::swap(colperm[pc], colperm[k]);
            det = -det;
        }
        const long double p = a[k][k];
        det *= p;
        for (std::size_t j = 0; j < n; ++j) a[k][j] /= p, inv[k][j] /= p;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k || a[i][k] == 0.0L) continue;
            const long double f = a[i][k];
            for (std::size_t j = 0; j < n; ++j) a[i][j] -= f * a[k][j], inv[i][j] -= f * inv[k][j];
        }
    }
    // undo column pivoting: rows of the inverse follow the column permutation
    LMat out(n);
    for (std::size_t k = 0; k < n; ++k) out[colperm[k]] = inv[k];
    return {out, det};
}

/// b_1..b_count by the defining sums, no running window.
inline std::vector<double> b_direct(int D, double a, int count) {
    std::vector<double> b;
    for (int i = 1; i <= count; ++i) {
        if (D == 0) {
            b.push_back(0.0);
        } else if (i <= D) {
            b.push_back(a);
        } else {
            long double s = 0.0L;
            for (int j = i - D; j <= i - 1; ++j) s += b[static_cast<std::size_t>(j - 1)];
            b.push_back(static_cast<double>(a / (a * D + 1.0) * s));
        }
    }
    return b;
}

/// Larger root by the stable +-b formula in long double.
inline double larger_root(long double qa, long double qb, long double qc) {
    const long double disc = std::max(0.0L, qb * qb - 4 * qa * qc);
    const long double q = -0.5L * (qb + std::copysign(std::sqrt(disc), qb));
    const long double r1 = q / qa;
    const long double r2 = q != 0.0L ? qc / q : r1;
    return static_cast<double>(std::max(r1, r2));
}

/// Toeplitz A with A_ij = b_|i-j|, b_0 = a + 1.
inline LMat toeplitz_A(double a, int D, int n) {
    const auto b = b_direct(D, a, n - 1);
    LMat A(static_cast<std::size_t>(n), std::vector<long double>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int d = std::abs(i - j);
            A[i][j] = d == 0 ? a + 1.0 : b[static_cast<std::size_t>(d - 1)];
        }
    return A;
}

/// Terminal value of the optimal strategy: (x (A - I) x' + 2 mu sum x - n a sigma_hat^2) / (2 sigma^2).
inline double optimal_terminal_value(const delayhedge::DiscreteMarket& m, double a,
                                     const std::vector<double>& x) {
    const auto A = toeplitz_A(a, m.delay, m.n);
    long double q = 0.0L, s = 0.0L;
    for (int i = 0; i < m.n; ++i) {
        s += x[i];
        for (int j = 0; j < m.n; ++j) q += x[i] * (A[i][j] - (i == j ? 1.0L : 0.0L)) * x[j];
    }
    const long double s2 = m.sigma * m.sigma;
    return static_cast<double>(
        (q + 2.0L * m.mu * s - m.n * a * m.sigma_hat * m.sigma_hat) / (2.0L * s2));
}

/// kappa' = alpha (kappa(t) - kappa(t - H)) on [H, 1] with kappa = level on [0, H) and
/// kappa(H) = alpha H level. Exact exponential step with the history linear on each step.
/// Returns kappa at t = i / steps_per_unit for i = 0..steps_per_unit; H must be a grid multiple.
inline std::vector<double> delay_ode_exponential(double alpha, double H, int steps_per_unit) {
    const double dt = 1.0 / steps_per_unit;
    const int lag = static_cast<int>(std::lround(H * steps_per_unit));
    const double level = alpha / (1.0 - alpha * H);
    std::vector<double> k(static_cast<std::size_t>(steps_per_unit) + 1, level);
    k[lag] = alpha * H * level;
    const double e = std::exp(alpha * dt);
    const double e1 = e - 1.0;
    const double e2 = alpha != 0.0 ? (e - 1.0 - alpha * dt) / (alpha * dt) : 0.0;
    for (int i = lag; i < steps_per_unit; ++i) {
        const int j = i - lag;
        // history on [t_i - H, t_i+1 - H]; left limit of the level at H
        const double f0 = j + 1 <= lag ? level : k[j];
        const double f1 = j + 1 <= lag ? level : k[j + 1];
        k[i + 1] = e * k[i] - f0 * e1 - (f1 - f0) * e2;
    }
    return k;
}

#ifdef DELAYHEDGE_CLI
struct Run {
    int status = -1;
    std::string out;
};

/// Runs the command line tool and captures stdout; stderr passes through unless redirected in args.
inline Run run_cli(const std::string& args, const std::string& env = "") {
    const std::string cmd = (env.empty() ? "" : "env " + env + " ") + DELAYHEDGE_CLI + " " + args;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    Run r;
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}
#endif

}  // namespace ref
