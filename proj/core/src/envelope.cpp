#include "icxopt/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace icxopt {

void SampledFunction::validate() const {
    if (grid.size() < 2 || grid.size() != values.size())
        throw std::invalid_argument("SampledFunction: need n >= 1 and matching sizes");
    if (grid.front() != 0.0 || grid.back() != 1.0)
        throw std::invalid_argument("SampledFunction: grid must span exactly [0,1]");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(grid[i] < grid[i + 1]))
            throw std::invalid_argument("SampledFunction: grid must be strictly increasing");
    for (double v : values)
        if (!std::isfinite(v))
            throw std::invalid_argument("SampledFunction: values must be finite");
}

namespace {

constexpr double kCrossEps = 1e-12;  // relative tolerance on cross products

// Lower hull of (x_i, y_i) by monotone chain.  Keeps index b between a and c
// only on a strict convex turn; ties (collinear within kCrossEps relative)
// drop the middle point so segments are maximal.
std::vector<std::size_t> lower_hull(const std::vector<double>& x,
                                    const std::vector<double>& y) {
    std::vector<std::size_t> hull;
    hull.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        while (hull.size() >= 2) {
            const std::size_t a = hull[hull.size() - 2];
            const std::size_t b = hull[hull.size() - 1];
            const double t1 = (x[b] - x[a]) * (y[i] - y[a]);
            const double t2 = (y[b] - y[a]) * (x[i] - x[a]);
            const double scale = std::abs(t1) + std::abs(t2);
            if (t1 - t2 <= kCrossEps * scale)
                hull.pop_back();  // b on or above chord a->i
            else
                break;
        }
        hull.push_back(i);
    }
    return hull;
}

EnvelopeResult build(const SampledFunction& f, bool concave) {
    f.validate();
    const std::size_t n = f.grid.size();
    std::vector<double> y = f.values;
    if (concave)
        for (double& v : y) v = -v;

    EnvelopeResult r;
    r.hull_indices = lower_hull(f.grid, y);

    const std::size_t m = r.hull_indices.size() - 1;
    r.slope_bounds.resize(m + 1);
    r.slopes.resize(m);
    r.values.resize(n);
    for (std::size_t k = 0; k <= m; ++k) r.slope_bounds[k] = f.grid[r.hull_indices[k]];
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t a = r.hull_indices[k];
        const std::size_t b = r.hull_indices[k + 1];
        const double sl = (y[b] - y[a]) / (f.grid[b] - f.grid[a]);
        r.slopes[k] = concave ? -sl : sl;
        for (std::size_t i = a; i < b; ++i) {
            const double v = y[a] + sl * (f.grid[i] - f.grid[a]);
            r.values[i] = concave ? -v : v;
        }
    }
    r.values[n - 1] = f.values[n - 1];
    // hull vertices interpolate the function exactly
    for (std::size_t idx : r.hull_indices) r.values[idx] = f.values[idx];
    return r;
}

}  // namespace

EnvelopeResult convex_envelope(const SampledFunction& f) { return build(f, false); }

EnvelopeResult concave_envelope(const SampledFunction& f) { return build(f, true); }

double envelope_slope_at(const EnvelopeResult& e, double s) {
    if (!(s >= 0.0 && s < 1.0))
        throw std::invalid_argument("envelope_slope_at: s outside [0,1)");
    auto it = std::upper_bound(e.slope_bounds.begin(), e.slope_bounds.end(), s);
    const std::size_t k = static_cast<std::size_t>(it - e.slope_bounds.begin());
    return e.slopes[k - 1];
}

}  // namespace icxopt
