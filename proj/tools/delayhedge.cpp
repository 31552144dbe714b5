// SPDX-License-Identifier: Apache-2.0
//
// delayhedge: explicit delayed semistatic hedges, their continuous limit, and the
// verification suites, from the command line. JSON or CSV on stdout (or --out).
//
// Exit codes: 0 success, 1 verification failure, 2 usage or domain error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "delayhedge/convergence.hpp"
#include "delayhedge/dual.hpp"
#include "delayhedge/kernel.hpp"
#include "delayhedge/monte_carlo.hpp"
#include "delayhedge/report_json.hpp"
#include "delayhedge/solver.hpp"
#include "delayhedge/toeplitz.hpp"
#include "delayhedge/verify.hpp"

namespace dh = delayhedge;
using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

struct MarketArgs {
    int n = 4;
    int delay = 0;
    double mu = 0.0;
    double sigma = 1.0;
    double sigma_hat = 1.0;
    double s0 = 0.0;
};

struct Options {
    MarketArgs market;
    MarketArgs sim_market{5, 2, 0.1, 1.0, 1.3, 0.0};
    // continuous market
    std::string H = "0.2";
    double theta = 0.0;
    double vsigma = 1.0;
    double vsigma_hat = 1.0;
    double ratio = 0.5;
    // runs
    std::string suite = "all";
    int grid_size = 5;
    std::size_t paths = 100000;
    std::uint64_t seed = 42;
    double perturb = 1.0;
    double perturb_static = 1.0;
    int grid = 500;
    std::string ns = "100,1000";
    bool unshifted = false;
    std::string h_grid = "0.02:1.0:0.02";
    std::string logratio_grid = "-2.0:2.0:0.1";
    bool inverse = false;
    std::string out;
    unsigned threads = 1;
};

std::string format_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) parts.push_back(item);
    return parts;
}

double parse_double(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw dh::DomainError("not a number: '" + s + "'");
    }
    if (used != s.size()) throw dh::DomainError("not a number: '" + s + "'");
    return v;
}

/// "start:stop:step" or "v1,v2,...".
std::vector<double> parse_grid(const std::string& spec) {
    const auto parts = split(spec, ':');
    if (parts.size() == 3)
        return dh::uniform_grid(parse_double(parts[0]), parse_double(parts[1]),
                                parse_double(parts[2]));
    if (spec.find(':') != std::string::npos)
        throw dh::DomainError("grid must be start:stop:step or a comma list");
    std::vector<double> values;
    for (const auto& p : split(spec, ',')) values.push_back(parse_double(p));
    if (values.empty()) throw dh::DomainError("empty grid");
    return values;
}

std::vector<int> parse_ints(const std::string& spec) {
    std::vector<int> values;
    for (const auto& p : split(spec, ',')) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(p, &used);
        } catch (const std::exception&) {
            throw dh::DomainError("not an integer: '" + p + "'");
        }
        if (used != p.size()) throw dh::DomainError("not an integer: '" + p + "'");
        values.push_back(v);
    }
    if (values.empty()) throw dh::DomainError("empty list");
    return values;
}

dh::DiscreteMarket discrete_market(const MarketArgs& o) {
    return dh::validate_discrete({o.n, o.delay, o.mu, o.sigma, o.sigma_hat, o.s0});
}

json market_json(const dh::DiscreteMarket& m) {
    return {{"n", m.n},         {"delay", m.delay},         {"mu", m.mu},
            {"sigma", m.sigma}, {"sigma_hat", m.sigma_hat}, {"s0", m.s0}};
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw dh::DomainError("cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

void emit_json(const Options& o, const std::string& command, json config, json body) {
    config["threads"] = o.threads;
    json doc{{"schema_version", kSchemaVersion}, {"command", command}, {"config", std::move(config)}};
    doc.update(body);
    Output out(o.out);
    out.stream() << doc.dump(2) << '\n';
}

int cmd_solve(const Options& o) {
    const auto m = discrete_market(o.market);
    const auto sol = dh::solve(m);
    emit_json(o, "solve", market_json(m),
              {{"a", sol.a},
               {"b", sol.b},
               {"static_coeff", sol.static_coeff},
               {"merton", sol.merton},
               {"value", sol.value},
               {"c_hat", dh::c_hat(m, sol.a)}});
    return 0;
}

int cmd_verify(const Options& o) {
    if (o.grid_size < 1 || o.grid_size > 7) throw dh::DomainError("grid-size must be in [1, 7]");
    std::vector<dh::CheckResult> checks;
    auto append = [&](std::vector<dh::CheckResult> more) {
        checks.insert(checks.end(), more.begin(), more.end());
    };
    const auto grid = dh::default_grid(o.grid_size);
    const bool all = o.suite == "all";
    if (all || o.suite == "matrix") append(dh::matrix_suite(grid));
    if (all || o.suite == "dual") append(dh::dual_suite(grid));
    if (all || o.suite == "kernel") append(dh::kernel_suite());
    if (all || o.suite == "convergence") append(dh::convergence_suite());
    if (checks.empty()) throw dh::DomainError("unknown suite '" + o.suite + "'");
    const bool ok = dh::all_passed(checks);
    emit_json(o, "verify", {{"suite", o.suite}, {"grid_size", o.grid_size}, {"grid_points", grid.size()}},
              {{"passed", ok}, {"checks", checks}});
    return ok ? 0 : 1;
}

int cmd_simulate(const Options& o) {
    const auto m = discrete_market(o.sim_market);
    if (o.paths < 100) throw dh::DomainError("paths must be >= 100");
    const auto optimal = dh::strategy(m);
    const auto w = dh::perturbed(optimal, o.perturb, o.perturb_static);
    const auto batch = dh::generate(m, o.paths, o.seed, o.threads);
    const auto report = dh::estimate_utility(batch, w, m, o.threads);
    const double best = dh::value(m);
    auto config = market_json(m);
    config.update({{"paths", o.paths},
                   {"seed", o.seed},
                   {"perturb", o.perturb},
                   {"perturb_static", o.perturb_static},
                   {"generator", "philox4x32-10/inverse-cdf/v1"}});
    emit_json(o, "simulate", config,
              {{"report", report},
               {"optimal_value", best},
               {"empirical_minus_optimal_in_std_errors",
                report.std_error > 0.0 ? (report.empirical_mean - best) / report.std_error : 0.0}});
    return 0;
}

int cmd_kernel(const Options& o) {
    if (!(o.ratio > 0.0)) throw dh::DomainError("ratio must be positive");
    if (o.grid < 1) throw dh::DomainError("grid must be >= 1");
    const dh::ContinuousMarket c{dh::Delay::parse(o.H), 0.0, 1.0, std::sqrt(o.ratio), 0.0};
    const auto spec = dh::make_kernel_spec(c);
    dh::Table t;
    t.comment = "command=kernel H=" + o.H + " ratio=" + format_g(o.ratio) +
                " grid=" + std::to_string(o.grid) + " alpha=" + format_g(spec.alpha);
    t.columns = {"t", "kappa", "gamma_kernel"};
    for (int i = 0; i <= o.grid; ++i) {
        const double time = static_cast<double>(i) / o.grid;
        t.rows.push_back({time, dh::kappa(time, spec), dh::gamma_kernel(time, spec)});
    }
    Output out(o.out);
    t.write_csv(out.stream());
    return 0;
}

int cmd_limit(const Options& o) {
    const dh::ContinuousMarket c =
        dh::validate_continuous({dh::Delay::parse(o.H), o.theta, o.vsigma, o.vsigma_hat, 0.0});
    const auto spec = dh::make_kernel_spec(c);
    emit_json(o, "limit",
              {{"H", c.H.value()}, {"theta", c.theta}, {"vsigma", c.varsigma}, {"vsigma_hat", c.varsigma_hat}},
              {{"alpha", spec.alpha},
               {"limit_value", dh::limit_value(c)},
               {"limit_static_coeff", dh::limit_static_coeff(c)}});
    return 0;
}

int cmd_fig1(const Options& o) {
    if (!(o.ratio > 0.0)) throw dh::DomainError("ratio must be positive");
    const dh::ContinuousMarket c{dh::Delay::parse(o.H), 0.0, 1.0, std::sqrt(o.ratio), 0.0};
    auto t = dh::figure1_data(c, parse_ints(o.ns), o.grid, o.unshifted);
    t.comment = "command=fig1 H=" + o.H + " ratio=" + format_g(o.ratio) + " ns=" + o.ns +
                " grid=" + std::to_string(o.grid) + " theta=0 vsigma=1";
    Output out(o.out);
    t.write_csv(out.stream());
    return 0;
}

int cmd_fig2(const Options& o) {
    auto t = dh::figure2_data(parse_grid(o.h_grid), parse_grid(o.logratio_grid));
    t.comment = "command=fig2 h_grid=" + o.h_grid + " logratio_grid=" + o.logratio_grid +
                " theta=0 vsigma=1";
    Output out(o.out);
    t.write_csv(out.stream());
    return 0;
}

int cmd_matrix(const Options& o) {
    const auto m = discrete_market(o.market);
    const double a = dh::solve_a(m);
    const auto mat = o.inverse ? dh::inverse_via_v(a, m.delay, m.n) : dh::build_A(a, m.delay, m.n).to_dense();
    Output out(o.out);
    out.stream() << "# command=matrix n=" << m.n << " delay=" << m.delay << " sigma=" << format_g(m.sigma)
                 << " sigma_hat=" << format_g(m.sigma_hat) << " which=" << (o.inverse ? "inverse" : "A")
                 << '\n';
    mat.write_csv(out.stream());
    return 0;
}

void add_discrete(CLI::App* app, MarketArgs& o) {
    app->add_option("--n", o.n, "number of trading steps");
    app->add_option("--delay", o.delay, "delay D in steps (0 <= D < n)");
    app->add_option("--mu", o.mu, "per-step drift");
    app->add_option("--sigma", o.sigma, "per-step volatility");
    app->add_option("--sigma-hat", o.sigma_hat, "static pricing volatility per step");
    app->add_option("--s0", o.s0, "initial price (reporting only)");
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    if (const char* env = std::getenv("DELAYED_HEDGE_THREADS")) {
        try {
            o.threads = static_cast<unsigned>(std::stoul(env));
        } catch (const std::exception&) {
            std::cerr << "ignoring DELAYED_HEDGE_THREADS='" << env << "'\n";
        }
    }

    CLI::App app{"Explicit delayed semistatic hedging under exponential utility"};
    app.require_subcommand(1);
    app.add_option("--threads", o.threads, "worker threads (0 = hardware)");
    app.add_option("--out", o.out, "write output to this file instead of stdout");

    auto* solve = app.add_subcommand("solve", "optimal root, weights, static leg and value");
    add_discrete(solve, o.market);

    auto* verify = app.add_subcommand("verify", "run the identity suites");
    verify->add_option("--suite", o.suite, "matrix|dual|kernel|convergence|all")
        ->check(CLI::IsMember({"matrix", "dual", "kernel", "convergence", "all"}));
    verify->add_option("--grid-size", o.grid_size, "n ranges over 2, 4, ..., 2^grid-size");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo utility of the (perturbed) optimum");
    add_discrete(simulate, o.sim_market);
    simulate->add_option("--paths", o.paths);
    simulate->add_option("--seed", o.seed);
    simulate->add_option("--perturb", o.perturb, "scale of the feedback kernel");
    simulate->add_option("--perturb-static", o.perturb_static, "scale of the static leg");

    auto* kernel = app.add_subcommand("kernel", "kappa and the Volterra weight on [0, 1] as CSV");
    kernel->add_option("--H", o.H, "delay in (0, 1]");
    kernel->add_option("--ratio", o.ratio, "varsigma_hat^2 / varsigma^2");
    kernel->add_option("--grid", o.grid, "number of intervals on [0, 1]");

    auto* limit = app.add_subcommand("limit", "continuous-limit alpha, value and static leg");
    limit->add_option("--H", o.H);
    limit->add_option("--theta", o.theta);
    limit->add_option("--vsigma", o.vsigma);
    limit->add_option("--vsigma-hat", o.vsigma_hat);

    auto* fig1 = app.add_subcommand("fig1", "scaled discrete weights against the limit kernel");
    fig1->add_option("--H", o.H);
    fig1->add_option("--ratio", o.ratio, "varsigma_hat^2 / varsigma^2");
    fig1->add_option("--ns", o.ns, "comma separated step counts");
    fig1->add_option("--grid", o.grid);
    fig1->add_flag("--unshifted", o.unshifted, "also emit kappa and n*b columns");

    auto* fig2 = app.add_subcommand("fig2", "limit value over (H, log varsigma_hat/varsigma)");
    fig2->add_option("--h-grid", o.h_grid, "start:stop:step or comma list");
    fig2->add_option("--logratio-grid", o.logratio_grid, "start:stop:step or comma list");

    auto* matrix = app.add_subcommand("matrix", "dump A (or its inverse) as CSV");
    add_discrete(matrix, o.market);
    matrix->add_flag("--inverse", o.inverse);

    for (auto* sub : {solve, verify, simulate, kernel, limit, fig1, fig2, matrix})
        sub->add_option("--out", o.out, "write output to this file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    try {
        if (solve->parsed()) return cmd_solve(o);
        if (verify->parsed()) return cmd_verify(o);
        if (simulate->parsed()) return cmd_simulate(o);
        if (kernel->parsed()) return cmd_kernel(o);
        if (limit->parsed()) return cmd_limit(o);
        if (fig1->parsed()) return cmd_fig1(o);
        if (fig2->parsed()) return cmd_fig2(o);
        if (matrix->parsed()) return cmd_matrix(o);
    } catch (const dh::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
