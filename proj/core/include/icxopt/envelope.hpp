#pragma once

#include <cstddef>
#include <vector>

namespace icxopt {

/// Function sampled on an increasing grid over [0,1] (endpoints included).
struct SampledFunction {
    std::vector<double> grid;    // n+1 abscissae, grid[0] == 0, grid[n] == 1
    std::vector<double> values;  // n+1 ordinates

    void validate() const;
};

/// Piecewise-linear envelope of a sampled function.
///
/// The envelope interpolates the function at hull_indices and is affine in
/// between; slopes are per-segment and monotone (increasing for the convex
/// envelope, decreasing for the concave one).
struct EnvelopeResult {
    std::vector<std::size_t> hull_indices;  // grid indices touched, first is 0, last is n
    std::vector<double> slope_bounds;       // hull abscissae, size m+1
    std::vector<double> slopes;             // segment slopes, size m
    std::vector<double> values;             // envelope evaluated on the full grid
};

/// Largest convex minorant of the sampled points (lower hull, monotone-chain
/// scan, O(n)).  Collinear points are dropped so hull segments are maximal.
EnvelopeResult convex_envelope(const SampledFunction& f);

/// Smallest concave majorant (upper hull).
EnvelopeResult concave_envelope(const SampledFunction& f);

/// Right derivative of the envelope at s in [0,1): the slope of the segment
/// containing s, right-continuous at hull points.
double envelope_slope_at(const EnvelopeResult& e, double s);

}  // namespace icxopt
