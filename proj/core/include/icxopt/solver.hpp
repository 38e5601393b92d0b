#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "icxopt/sdf_model.hpp"
#include "icxopt/step_quantile.hpp"

namespace icxopt {

/// Thrown when root finding or iteration fails to converge.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SolveMode { Exact, Gridded };

/// Variance minimization under a budget constraint and an
/// increasing-convex-order benchmark-beating constraint.
struct IcxProblem {
    SdfModel sdf;
    StepQuantile benchmark;      // Q_0, bounded by construction
    double budget = 1.0;         // x
    int grid_size = 4096;        // n, output grid / Gridded-mode quadrature
    SolveMode mode = SolveMode::Exact;

    void validate() const;
};

enum class CaseTag { Trivial, ClosedFormConstant, ClosedFormTwoPoint, General };

/// Exact representation of an optimal payoff quantile:
///   Q(s) = intercepts[k] - kappa * Q_rho((1-s)-)   on [bounds[k], bounds[k+1]).
/// kappa = lambda/2.  Available whenever the solve ran in closed form or in
/// Exact mode; the gridded branch has no exact representation.
struct PayoffPieces {
    std::vector<double> bounds;      // m+1 probabilities, 0 ... 1
    std::vector<double> intercepts;  // m values, nondecreasing
    double kappa = 0.0;

    double value_at(const SdfModel& sdf, double s) const;
};

struct IcxSolution {
    StepQuantile q_star;        // optimal quantile on the output grid / exact steps
    double lambda = 0.0;        // budget multiplier (0 in the trivial case)
    double beta = 0.0;          // variance center beta_lambda
    double variance = 0.0;
    double budget_used = 0.0;   // int Q(s) Q_rho(1-s) ds
    double mean = 0.0;
    CaseTag case_tag = CaseTag::General;
    std::string case_detail;    // "a"/"b"/"c" for the two-point closed form
    std::optional<PayoffPieces> pieces;
    // Trivial case: any constant in [trivial_lo, trivial_hi] is optimal.
    std::optional<std::pair<double, double>> trivial_interval;
};

/// Optimal quantile of the inner problem for fixed multipliers (beta, lambda):
/// builds N_lambda, takes its convex envelope and applies
///   Q(s) = beta + ((Nslope(s) - 2 beta)^+ - lambda Q_rho((1-s)-)) / 2.
/// Exact mode restricts envelope vertices to the benchmark breakpoints
/// (N_lambda is concave between them); Gridded mode uses the midpoint grid.
StepQuantile fixed_multiplier_quantile(const IcxProblem& p, double beta, double lambda);

/// Derivative of the inner optimal value with respect to beta:
///   lambda E[rho] - int_0^1 (Nslope(s) - 2 beta)^+ ds,
/// integrated exactly over the envelope's slope segments.  Nondecreasing in
/// beta; its root is the optimal centering.
double center_gradient(const IcxProblem& p, double beta, double lambda);

/// Smallest beta with |center_gradient| <= tol (piecewise-linear root).
double solve_center(const IcxProblem& p, double lambda, double tol = 1e-12);

/// Budget consumed by the lambda-optimal quantile; strictly decreasing in
/// lambda with limit Q_0(1) E[rho] as lambda -> 0.
double budget_of_lambda(const IcxProblem& p, double lambda);

/// Closed form for a benchmark with exactly two atoms a < b (weight p on a).
/// Requires budget < b E[rho]; otherwise the trivial branch applies.
IcxSolution two_point_closed_form(const IcxProblem& p);

/// General branch: bisection on lambda -> budget_of_lambda(lambda) = x.
/// Usable for any benchmark; solve() routes here when no closed form applies.
IcxSolution solve_general(const IcxProblem& p, double budget_tol = 1e-10);

/// Variance-minimal quantile subject to the budget and the ICX constraint.
/// Dispatch: trivial constant when Q_0(1) E[rho] <= x, closed forms for one-
/// and two-atom benchmarks, bisection on the multiplier otherwise.
IcxSolution solve(const IcxProblem& p, double budget_tol = 1e-10);

}  // namespace icxopt
