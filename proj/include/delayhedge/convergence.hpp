// SPDX-License-Identifier: Apache-2.0
#pragma once

// Bridge between the n-step weights and the continuous kernel, and the tables behind the
// convergence figures.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "delayhedge/errors.hpp"
#include "delayhedge/kernel.hpp"
#include "delayhedge/market.hpp"
#include "delayhedge/solver.hpp"

namespace delayhedge {

/// b^n_t = values[k] on [k/n, (k+1)/n), last interval closed.
struct StepFunction {
    int n = 0;
    std::vector<double> values;

    double operator()(double t) const {
        const auto k = static_cast<long>(std::floor(t * n));
        return values[static_cast<std::size_t>(std::clamp(k, 0L, static_cast<long>(n) - 1))];
    }
};

/// values[k] = n * b_{k+1} for the market discretized on n steps.
inline StepFunction build_bn(const ContinuousMarket& c, int n) {
    const auto m = discretize(c, n);
    const double a = solve_a(m);
    auto b = weights_b(m, a, n);
    for (double& v : b) v *= n;
    return {n, std::move(b)};
}

/// n * a_n, which tends to alpha / (1 - alpha H).
inline double scaled_root(const ContinuousMarket& c, int n) { return n * solve_a(discretize(c, n)); }

/// Squared L2[0,1] distance between b^n and kappa; Simpson with `quadsteps` panels on every
/// piece between consecutive multiples of 1/n and of H.
inline double l2_distance_to_kappa(const StepFunction& f, const KernelSpec& spec, long quadsteps) {
    quadsteps = std::max(quadsteps, 1L);
    double acc = 0.0;
    for (int cell = 0; cell < f.n; ++cell) {
        const double lo = static_cast<double>(cell) / f.n;
        const double hi = static_cast<double>(cell + 1) / f.n;
        const double level = f.values[static_cast<std::size_t>(cell)];
        for_each_smooth_segment(lo, hi, spec, [&](double x, double y, long k) {
            const double h = (y - x) / static_cast<double>(quadsteps);
            for (long p = 0; p < quadsteps; ++p) {
                const double x0 = x + static_cast<double>(p) * h;
                const double x1 = p + 1 == quadsteps ? y : x0 + h;
                auto sq = [&](double t) {
                    const double d = level - kappa_piece(t, k, spec);
                    return d * d;
                };
                acc += (x1 - x0) / 6.0 * (sq(x0) + 4.0 * sq(0.5 * (x0 + x1)) + sq(x1));
            }
        });
    }
    return acc;
}

/// Column-labelled numeric table with an optional '#' metadata line.
namespace detail {

inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace detail

struct Table {
    std::string comment;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const {
        const auto it = std::find(columns.begin(), columns.end(), name);
        if (it == columns.end()) throw DomainError("no column '" + name + "'");
        return static_cast<std::size_t>(it - columns.begin());
    }

    /// Comma separated, values "%.12g", newline terminated.
    void write_csv(std::ostream& os) const {
        if (!comment.empty()) os << "# " << comment << '\n';
        for (std::size_t j = 0; j < columns.size(); ++j) os << (j ? "," : "") << columns[j];
        os << '\n';
        char buf[40];
        for (const auto& r : rows) {
            for (std::size_t j = 0; j < r.size(); ++j) {
                std::snprintf(buf, sizeof buf, "%.12g", r[j]);
                os << (j ? "," : "") << buf;
            }
            os << '\n';
        }
    }
};

/// t, kappa_shifted = kappa_t - alpha/(1 - alpha H), and per n the column "n<n>" holding
/// n (b^n_t / n - a_n) on t = i / grid. With `unshifted`, also kappa and "nb<n>" = b^n_t.
inline Table figure1_data(const ContinuousMarket& c, const std::vector<int>& ns, int grid,
                          bool unshifted = false) {
    if (grid < 1) throw DomainError("grid must be >= 1");
    if (ns.empty()) throw DomainError("need at least one n");
    const auto spec = make_kernel_spec(c);
    std::vector<StepFunction> steps;
    std::vector<double> roots;
    for (int n : ns) {
        steps.push_back(build_bn(c, n));
        roots.push_back(scaled_root(c, n));
    }
    Table t;
    t.comment = "fig1 H=" + detail::format_number(spec.H) + " alpha=" + detail::format_number(spec.alpha) +
                " grid=" + std::to_string(grid);
    t.columns = {"t", "kappa_shifted"};
    for (int n : ns) t.columns.push_back("n" + std::to_string(n));
    if (unshifted) {
        t.columns.push_back("kappa");
        for (int n : ns) t.columns.push_back("nb" + std::to_string(n));
    }
    for (int i = 0; i <= grid; ++i) {
        const double time = static_cast<double>(i) / grid;
        std::vector<double> row{time, gamma_kernel(time, spec)};
        std::vector<double> raw;
        for (std::size_t s = 0; s < ns.size(); ++s) {
            const std::int64_t n = ns[s];
            // exact floor(t n) for t = i / grid
            const auto k = std::min<std::int64_t>(i * n / grid, n - 1);
            const double nb = steps[s].values[static_cast<std::size_t>(k)];
            row.push_back(nb - roots[s]);
            raw.push_back(nb);
        }
        if (unshifted) {
            row.push_back(kappa(time, spec));
            row.insert(row.end(), raw.begin(), raw.end());
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

/// H, log_ratio, U with U the limit value at theta = 0, varsigma = 1,
/// varsigma_hat = exp(log_ratio). Rows sorted by (H, log_ratio).
inline Table figure2_data(std::vector<double> h_grid, std::vector<double> logratio_grid) {
    std::sort(h_grid.begin(), h_grid.end());
    std::sort(logratio_grid.begin(), logratio_grid.end());
    Table t;
    t.comment = "fig2 theta=0 varsigma=1 varsigma_hat=exp(log_ratio)";
    t.columns = {"H", "log_ratio", "U"};
    for (double h : h_grid) {
        if (!(h > 0.0 && h <= 1.0)) throw DomainError("H must lie in (0, 1]");
        for (double lr : logratio_grid) {
            ContinuousMarket c{Delay(h), 0.0, 1.0, std::exp(lr), 0.0};
            t.rows.push_back({h, lr, limit_value(c)});
        }
    }
    return t;
}

/// Uniform grid start, start + step, ..., up to stop (inclusive within rounding).
inline std::vector<double> uniform_grid(double start, double stop, double step) {
    if (!(step > 0.0)) throw DomainError("grid step must be positive");
    std::vector<double> g;
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    // on-lattice starts are generated as integer multiples of step so that 0 is hit exactly
    const double lattice = start / step;
    const bool aligned = std::abs(lattice - std::nearbyint(lattice)) < 1e-9;
    for (long i = 0; i <= count; ++i)
        g.push_back(aligned ? (std::nearbyint(lattice) + static_cast<double>(i)) * step
                            : start + static_cast<double>(i) * step);
    return g;
}

}  // namespace delayhedge
