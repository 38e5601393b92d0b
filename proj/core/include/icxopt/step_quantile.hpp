#pragma once

#include <cstddef>
#include <vector>

namespace icxopt {

/// Right-continuous increasing step function on [0,1), used as the quantile
/// function of a discrete (or gridded) payoff.
///
/// Q(s) = values[i] for s in [breakpoints[i], breakpoints[i+1]), with
/// breakpoints[0] == 0 and breakpoints.back() == 1.  Q(1) is defined as the
/// left limit Q(1-), i.e. the top step value.
class StepQuantile {
public:
    /// Validates and takes ownership of the breakpoint/value arrays.
    /// Requires: breakpoints strictly increasing from exactly 0 to exactly 1,
    /// values weakly increasing and finite, values.size()+1 == breakpoints.size().
    StepQuantile(std::vector<double> breakpoints, std::vector<double> values);

    static StepQuantile constant(double c);
    /// Two atoms a <= b with probability p on a, 1-p on b.
    static StepQuantile two_point(double a, double b, double p);
    /// n atoms with given probabilities (must sum to 1 within 1e-12).
    static StepQuantile from_atoms(const std::vector<double>& atoms,
                                   const std::vector<double>& probs);
    /// Uniform grid of n cells [i/n,(i+1)/n) carrying the given cell values.
    static StepQuantile from_uniform_cells(std::vector<double> cell_values);

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t step_count() const { return values_.size(); }

    /// Right-continuous lookup; s in [0,1].  Q(1) = Q(1-) = top value.
    double value(double s) const;
    /// Left limit Q(s-); s in (0,1].  Equals the step value on (t_{i-1}, t_i].
    double left_limit(double s) const;
    /// Top step value Q(1).
    double top() const { return values_.back(); }
    /// Bottom step value Q(0).
    double bottom() const { return values_.front(); }

    /// Exact tail integral  int_t^1 Q(s) ds,  t in [0,1].
    double tail_integral(double t) const;
    /// Expected upside int_q^1 Q(s) ds, q in [0,1).
    double expected_upside(double q) const;
    double mean() const { return tail_integral(0.0); }
    double second_moment() const;
    double variance() const;

    /// Payoff realization Q(1-u) for a uniform draw u in (0,1) coupled
    /// comonotonically with the SDF.
    double realize_payoff(double u) const;

    /// Same steps shifted by a constant.
    StepQuantile shifted(double c) const;
    /// Merges adjacent steps with exactly equal values.
    StepQuantile simplified() const;

private:
    std::vector<double> breakpoints_;
    std::vector<double> values_;
};

/// Sorted union of the two breakpoint sets (exact merge, duplicates removed).
std::vector<double> union_breakpoints(const StepQuantile& a, const StepQuantile& b);

/// Increasing-convex-order dominance check: true iff
///   int_t^1 Q >= int_t^1 Q0 - tol  at every t in the union of both
/// breakpoint sets.  Sufficient for all t in [0,1] because both tail
/// integrals are piecewise linear with kinks only at their own breakpoints.
bool icx_dominates(const StepQuantile& q, const StepQuantile& q0, double tol = 1e-9);

}  // namespace icxopt
