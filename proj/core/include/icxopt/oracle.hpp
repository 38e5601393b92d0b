#pragma once

#include <string>
#include <vector>

#include "icxopt/solver.hpp"

namespace icxopt {

struct OracleOptions {
    double tol = 1e-9;                   // KKT residual target
    long max_total_cycles = 200000;      // Dykstra cycle budget across the solve
    int max_cycles_per_projection = 20000;
    double inner_tol = 1e-12;            // per-cycle displacement cutoff
};

/// Optimum of the discretized primal program found with no envelope/duality
/// machinery: projected gradient on the cell values with Dykstra projection
/// onto {monotone} cap {tail sums} cap {budget half-space}.
struct OracleResult {
    std::vector<double> q;  // optimal cell values on the midpoint grid
    int grid_size = 0;
    double variance = 0.0;
    double mean = 0.0;
    double budget = 0.0;
    double feasibility_residual = 0.0;  // worst tail/budget/monotone violation
    double kkt_residual = 0.0;          // fixed-point gap of the projected-gradient map
    long cycles = 0;
    bool converged = false;
    std::string diagnostic;
};

/// Solves the discretized program at grid size n (n >= 50).  Deterministic:
/// seed-free initialization q = x/E[rho].  Throws NumericalError with the
/// final residual when the cycle budget is exhausted before tol is met.
OracleResult oracle_solve(const IcxProblem& p, int n, const OracleOptions& opts = {});

/// Comparison of a solver solution against an independent oracle run.
struct OracleReport {
    bool pass = false;
    bool variance_ok = false;
    bool budget_ok = false;
    bool icx_ok = false;
    bool curve_ok = false;
    double oracle_variance = 0.0;
    double solution_variance = 0.0;
    double variance_rel_diff = 0.0;
    double budget_recomputed = 0.0;  // from q_star, on the oracle grid
    double budget_gap = 0.0;         // max(0, budget_recomputed - x)
    double icx_shortfall = 0.0;      // worst tail-integral deficit vs the benchmark
    double curve_sup_diff = 0.0;     // sup |q_star - oracle q| on the shared grid
    std::string summary;
};

/// Re-derives feasibility and optimality of `sol` from its q_star alone and
/// compares against oracle_solve at grid size n.  Never throws for a failing
/// solution; the report carries the failures.
OracleReport oracle_check(const IcxSolution& sol, const IcxProblem& p, int n,
                          double tol = 1e-3, const OracleOptions& opts = {});

}  // namespace icxopt
