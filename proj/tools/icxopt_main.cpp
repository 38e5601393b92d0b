// Command-line front end: problem ingestion, subcommand dispatch, JSON/CSV
// emission of solution curves and frontiers.
//
// Exit codes: 0 success, 2 validation error, 3 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "icxopt/beating.hpp"
#include "icxopt/envelope.hpp"
#include "icxopt/json_io.hpp"
#include "icxopt/oracle.hpp"
#include "icxopt/solver.hpp"

namespace {

using nlohmann::json;

struct CommonOpts {
    std::string input;
    std::string output;        // empty -> stdout
    std::string format = "json";
    int grid_size = 0;         // 0 -> keep the problem file's value
    double tol = 1e-10;
    double icx_tol = 1e-6;
};

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open input file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file: " + path);
    out << text;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("invalid JSON: ") + e.what());
    }
}

void add_common(CLI::App* cmd, CommonOpts& o, bool with_grid = true) {
    cmd->add_option("--input", o.input, "input JSON file ('-' for stdin)")->required();
    cmd->add_option("--output", o.output, "output file (default: stdout)");
    cmd->add_option("--format", o.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    if (with_grid) cmd->add_option("--grid-size", o.grid_size, "override the output grid");
    cmd->add_option("--tol", o.tol, "budget tolerance for the multiplier search");
    cmd->add_option("--icx-tol", o.icx_tol, "feasibility tolerance for reporting");
}

icxopt::IcxProblem load_problem(const CommonOpts& o, const json& j,
                                const std::vector<std::string>& extra = {}) {
    icxopt::IcxProblem p = icxopt::problem_from_json(j, extra);
    if (o.grid_size > 0) p.grid_size = o.grid_size;
    return p;
}

// (rho, payoff) samples of the comonotone coupling s -> (Q_rho((1-s)-), Q(s)).
std::string solution_curve_csv(const icxopt::IcxSolution& sol,
                               const icxopt::SdfModel& sdf) {
    constexpr int kPoints = 1001;
    std::string out = "s,rho,x_payoff\n";
    for (int i = 0; i < kPoints; ++i) {
        const double s = (i + 0.5) / kPoints;
        const double rho = sdf.quantile_left_limit(1.0 - s);
        const double payoff =
            sol.pieces ? sol.pieces->value_at(sdf, s) : sol.q_star.value(s);
        out += fmt(s) + "," + fmt(rho) + "," + fmt(payoff) + "\n";
    }
    return out;
}

// s, N_lambda, convex envelope, slope at the solution's multiplier.
std::string envelope_csv(const icxopt::IcxProblem& p, double lambda) {
    const int n = std::min(p.grid_size, 4096);
    icxopt::SampledFunction f;
    f.grid.resize(n + 1);
    f.values.resize(n + 1);
    double q0_acc = 0.0;
    f.grid[0] = 0.0;
    f.values[0] = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double s = static_cast<double>(i) / n;
        const double s_prev = static_cast<double>(i - 1) / n;
        q0_acc += 2.0 * (p.benchmark.tail_integral(s_prev) - p.benchmark.tail_integral(s));
        f.grid[i] = s;
        f.values[i] = lambda * p.sdf.tail_moment1(0.0, s) + q0_acc;
    }
    f.grid[n] = 1.0;
    const icxopt::EnvelopeResult env = icxopt::convex_envelope(f);
    std::string out = "s,n_lambda,envelope,slope\n";
    for (int i = 0; i <= n; ++i) {
        const double s = f.grid[i];
        const double slope = icxopt::envelope_slope_at(env, std::min(s, 1.0 - 1e-12));
        out += fmt(s) + "," + fmt(f.values[i]) + "," + fmt(env.values[i]) + "," +
               fmt(slope) + "\n";
    }
    return out;
}

int run_solve(const CommonOpts& o, const std::string& dump_envelope, bool mv, double z) {
    const json j = parse_json(read_input(o.input));
    const icxopt::IcxProblem p =
        mv ? load_problem(o, j, {"target_mean"}) : load_problem(o, j);
    double target = std::nan("");
    if (mv && j.contains("target_mean")) target = j.at("target_mean").get<double>();
    if (mv && !std::isnan(z)) target = z;  // the flag overrides the file

    const icxopt::IcxSolution sol =
        mv ? icxopt::mv_solve_with_icx(p, target, o.tol) : icxopt::solve(p, o.tol);

    if (!icxopt::icx_dominates(sol.q_star, p.benchmark, o.icx_tol))
        std::cerr << "warning: emitted quantile misses the benchmark by more than "
                  << o.icx_tol << "\n";

    if (!dump_envelope.empty() && sol.lambda > 0.0)
        write_output(dump_envelope, envelope_csv(p, sol.lambda));

    if (o.format == "csv")
        write_output(o.output, solution_curve_csv(sol, p.sdf));
    else
        write_output(o.output, icxopt::solution_to_json(sol).dump(2) + "\n");
    return 0;
}

int run_frontier(const CommonOpts& o, double z_min, double z_max, int z_steps) {
    const json j = parse_json(read_input(o.input));
    const icxopt::IcxProblem p = load_problem(o, j);

    std::vector<double> grid;
    if (std::isnan(z_min) && std::isnan(z_max)) {
        grid = icxopt::default_z_grid(p, z_steps);
    } else {
        const double lo = std::isnan(z_min) ? icxopt::frontier_z_min(p) : z_min;
        const double hi = std::isnan(z_max)
                              ? lo + 4.0 * std::sqrt(p.sdf.var_rho()) / p.sdf.e_rho()
                              : z_max;
        if (z_steps < 2 || !(hi > lo))
            throw std::invalid_argument("frontier: need z-max > z-min and z-steps >= 2");
        for (int i = 0; i < z_steps; ++i)
            grid.push_back(lo + (hi - lo) * static_cast<double>(i) / (z_steps - 1));
    }

    const auto pts = icxopt::bpsd_frontier(p, grid, o.tol);
    if (o.format == "csv") {
        std::string out = "z,std_dev\n";
        for (const auto& pt : pts) {
            if (!pt.ok()) {
                std::cerr << "frontier point z=" << pt.z << " failed: " << pt.error << "\n";
                continue;
            }
            out += fmt(pt.z) + "," + fmt(pt.std_dev) + "\n";
        }
        write_output(o.output, out);
    } else {
        write_output(o.output, icxopt::frontier_to_json(pts).dump(2) + "\n");
    }
    return 0;
}

int run_psi(const CommonOpts& o) {
    const json j = parse_json(read_input(o.input));
    if (!j.is_object() || !j.contains("quantile") || !j.contains("benchmark"))
        throw std::invalid_argument("psi: input needs 'quantile' and 'benchmark'");
    for (const auto& [key, _] : j.items())
        if (key != "quantile" && key != "benchmark")
            throw std::invalid_argument("psi: unknown field '" + key + "'");
    const double v = icxopt::psi(icxopt::quantile_from_json(j.at("quantile")),
                                 icxopt::quantile_from_json(j.at("benchmark")));
    if (o.format == "csv")
        write_output(o.output, "psi\n" + fmt(v) + "\n");
    else
        write_output(o.output, json{{"psi", v}}.dump(2) + "\n");
    return 0;
}

int run_reduce(const CommonOpts& o) {
    const json j = parse_json(read_input(o.input));
    if (!j.is_object() || !j.contains("benchmarks") || !j.at("benchmarks").is_array())
        throw std::invalid_argument("reduce: input needs a 'benchmarks' array");
    for (const auto& [key, _] : j.items())
        if (key != "benchmarks")
            throw std::invalid_argument("reduce: unknown field '" + key + "'");
    std::vector<icxopt::StepQuantile> qs;
    for (const auto& q : j.at("benchmarks")) qs.push_back(icxopt::quantile_from_json(q));
    const icxopt::StepQuantile reduced = icxopt::reduce_benchmarks(qs);
    if (o.format == "csv") {
        std::string out = "s_lo,s_hi,value\n";
        for (std::size_t i = 0; i < reduced.step_count(); ++i)
            out += fmt(reduced.breakpoints()[i]) + "," + fmt(reduced.breakpoints()[i + 1]) +
                   "," + fmt(reduced.values()[i]) + "\n";
        write_output(o.output, out);
    } else {
        write_output(o.output, icxopt::quantile_to_json(reduced).dump(2) + "\n");
    }
    return 0;
}

int run_oracle_check(const CommonOpts& o, int n, double check_tol) {
    const json j = parse_json(read_input(o.input));
    const icxopt::IcxProblem p = load_problem(o, j);
    const icxopt::IcxSolution sol = icxopt::solve(p, o.tol);
    const icxopt::OracleReport rep = icxopt::oracle_check(sol, p, n, check_tol);
    json out{{"pass", rep.pass},
             {"variance_ok", rep.variance_ok},
             {"budget_ok", rep.budget_ok},
             {"icx_ok", rep.icx_ok},
             {"curve_ok", rep.curve_ok},
             {"oracle_variance", rep.oracle_variance},
             {"solution_variance", rep.solution_variance},
             {"variance_rel_diff", rep.variance_rel_diff},
             {"budget_recomputed", rep.budget_recomputed},
             {"curve_sup_diff", rep.curve_sup_diff},
             {"summary", rep.summary}};
    write_output(o.output, out.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"variance-minimal payoffs under increasing-convex-order benchmark beating"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string dump_envelope;
    double z_min = std::nan(""), z_max = std::nan(""), mv_target = std::nan("");
    int z_steps = 40;
    int oracle_n = 2000;
    double oracle_tol = 1e-3;

    CLI::App* solve = app.add_subcommand("solve", "variance-minimal solve");
    add_common(solve, o);
    solve->add_option("--dump-envelope", dump_envelope,
                      "write the dual envelope at the optimal multiplier as CSV");

    CLI::App* frontier = app.add_subcommand("frontier", "BPSD efficient frontier");
    add_common(frontier, o);
    frontier->add_option("--z-min", z_min, "lowest performance level");
    frontier->add_option("--z-max", z_max, "highest performance level");
    frontier->add_option("--z-steps", z_steps, "number of frontier points");

    CLI::App* psi_cmd = app.add_subcommand("psi", "beating performance of a payoff");
    add_common(psi_cmd, o, /*with_grid=*/false);

    CLI::App* reduce = app.add_subcommand("reduce", "collapse benchmarks into one");
    add_common(reduce, o, /*with_grid=*/false);

    CLI::App* mv = app.add_subcommand("mv-solve", "mean-variance solve with the ICX constraint");
    add_common(mv, o);
    mv->add_option("--target-mean", mv_target, "overrides the file's target_mean");

    CLI::App* oracle = app.add_subcommand("oracle-check", "verify a solve against the oracle");
    add_common(oracle, o);
    oracle->add_option("--n", oracle_n, "oracle grid size");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return run_solve(o, dump_envelope, false, std::nan(""));
        if (frontier->parsed()) return run_frontier(o, z_min, z_max, z_steps);
        if (psi_cmd->parsed()) return run_psi(o);
        if (reduce->parsed()) return run_reduce(o);
        if (mv->parsed()) return run_solve(o, "", true, mv_target);
        if (oracle->parsed()) {
            // for oracle-check, --tol is the comparison tolerance
            const double check_tol = oracle->count("--tol") ? o.tol : oracle_tol;
            return run_oracle_check(oracle->count("--tol") ? CommonOpts{o.input, o.output,
                                                                        o.format, o.grid_size,
                                                                        1e-10, o.icx_tol}
                                                           : o,
                                    oracle_n, check_tol);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const icxopt::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
