#pragma once

#include <optional>
#include <string>
#include <vector>

#include "icxopt/solver.hpp"
#include "icxopt/step_quantile.hpp"

namespace icxopt {

/// Beating performance of Q against benchmark Q0:
///   psi = inf_{t in (0,1)} (1/t) int_{1-t}^1 (Q(s) - Q0(s)) ds,
/// the largest m with Q - m still ICX-dominating Q0.  For step quantiles the
/// objective is a ratio of affine functions of t between breakpoints, so the
/// infimum is attained at a breakpoint of the union grid (t -> 1 gives the
/// mean difference); the evaluation is exact.
double psi(const StepQuantile& q, const StepQuantile& q0);

/// One point of the beating-performance-standard-deviation frontier.
struct FrontierPoint {
    double z = 0.0;
    double std_dev = 0.0;
    std::optional<IcxSolution> solution;
    std::string error;  // nonempty when the point failed (e.g. z below domain)

    bool ok() const { return error.empty(); }
};

/// Smallest admissible performance level, x/E[rho] - Q_0(1).
double frontier_z_min(const IcxProblem& p);

/// For each z, the variance-minimal solve against the shifted benchmark
/// Q_0 + z.  Points are returned in input order; a z below the frontier
/// domain yields a per-point error entry rather than a failure.
std::vector<FrontierPoint> bpsd_frontier(const IcxProblem& p,
                                         const std::vector<double>& z_grid,
                                         double tol = 1e-10);

/// Default frontier grid: `steps` points from z_min to
/// z_min + 4 sqrt(Var[rho]) / E[rho] (four classical standard deviations).
std::vector<double> default_z_grid(const IcxProblem& p, int steps = 40);

/// Single benchmark equivalent to beating all of the given benchmarks:
/// the negated right derivative of the concave envelope of
/// g(t) = max_j int_t^1 Q_j.  Pairwise crossings of the affine pieces of the
/// tail integrals are inserted exactly so g is represented without error.
StepQuantile reduce_benchmarks(const std::vector<StepQuantile>& benchmarks);

/// Mean-variance selection with the ICX constraint: if the plain solve
/// already has mean >= z, it is returned; otherwise the mean target is folded
/// in as a second (constant) benchmark and reduced to a single-benchmark solve.
IcxSolution mv_solve_with_icx(const IcxProblem& p, double z, double tol = 1e-10);

}  // namespace icxopt
