#include "icxopt/beating.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "icxopt/envelope.hpp"

namespace icxopt {

double psi(const StepQuantile& q, const StepQuantile& q0) {
    const std::vector<double> pts = union_breakpoints(q, q0);
    // Backward sweep: at u = pts[k], tail = int_u^1 (q - q0); candidate
    // t = 1 - u for every union breakpoint u < 1 (u = 0 gives the mean gap).
    double best = std::numeric_limits<double>::infinity();
    double tail = 0.0;
    std::size_t iq = q.step_count();
    std::size_t i0 = q0.step_count();
    for (std::size_t k = pts.size() - 1; k-- > 0;) {
        const double lo = pts[k], hi = pts[k + 1];
        while (iq > 0 && q.breakpoints()[iq - 1] >= hi) --iq;
        while (i0 > 0 && q0.breakpoints()[i0 - 1] >= hi) --i0;
        tail += (q.values()[iq - 1] - q0.values()[i0 - 1]) * (hi - lo);
        best = std::min(best, tail / (1.0 - lo));
    }
    return best;
}

double frontier_z_min(const IcxProblem& p) {
    return p.budget / p.sdf.e_rho() - p.benchmark.top();
}

std::vector<FrontierPoint> bpsd_frontier(const IcxProblem& p,
                                         const std::vector<double>& z_grid, double tol) {
    p.validate();
    const double z_min = frontier_z_min(p);
    std::vector<FrontierPoint> out;
    out.reserve(z_grid.size());
    for (double z : z_grid) {
        FrontierPoint pt;
        pt.z = z;
        if (z < z_min - 1e-12 * (1.0 + std::abs(z_min))) {
            pt.error = "z below the frontier domain x/E[rho] - Q0(1)";
            out.push_back(std::move(pt));
            continue;
        }
        try {
            IcxProblem shifted = p;
            shifted.benchmark = p.benchmark.shifted(z);
            IcxSolution sol = solve(shifted, tol);
            pt.std_dev = std::sqrt(sol.variance);
            pt.solution = std::move(sol);
        } catch (const std::exception& e) {
            pt.error = e.what();
        }
        out.push_back(std::move(pt));
    }
    return out;
}

std::vector<double> default_z_grid(const IcxProblem& p, int steps) {
    if (steps < 2) throw std::invalid_argument("default_z_grid: need at least 2 steps");
    const double z0 = frontier_z_min(p);
    const double span = 4.0 * std::sqrt(p.sdf.var_rho()) / p.sdf.e_rho();
    std::vector<double> z(steps);
    for (int i = 0; i < steps; ++i)
        z[i] = z0 + span * static_cast<double>(i) / (steps - 1);
    return z;
}

namespace {

// Tail integrals of every benchmark at a common point set, one backward
// sweep per benchmark.
std::vector<std::vector<double>> tails_at(const std::vector<StepQuantile>& qs,
                                          const std::vector<double>& pts) {
    std::vector<std::vector<double>> tails(qs.size(), std::vector<double>(pts.size(), 0.0));
    for (std::size_t j = 0; j < qs.size(); ++j) {
        double acc = 0.0;
        std::size_t step = qs[j].step_count();
        for (std::size_t k = pts.size() - 1; k-- > 0;) {
            const double lo = pts[k], hi = pts[k + 1];
            while (step > 0 && qs[j].breakpoints()[step - 1] >= hi) --step;
            acc += qs[j].values()[step - 1] * (hi - lo);
            tails[j][k] = acc;
        }
    }
    return tails;
}

}  // namespace

StepQuantile reduce_benchmarks(const std::vector<StepQuantile>& benchmarks) {
    if (benchmarks.empty())
        throw std::invalid_argument("reduce_benchmarks: empty benchmark list");
    if (benchmarks.size() == 1) return benchmarks[0].simplified();

    // Union of all breakpoints.
    std::vector<double> pts;
    for (const auto& q : benchmarks)
        pts.insert(pts.end(), q.breakpoints().begin(), q.breakpoints().end());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    std::vector<std::vector<double>> tails = tails_at(benchmarks, pts);

    // Between consecutive union points every tail f_j is affine with slope
    // -Q_j; insert exact pairwise crossings so the max's kinks are vertices.
    std::vector<double> xs, ys;
    const std::size_t m = benchmarks.size();
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const double lo = pts[k], hi = pts[k + 1];
        std::vector<double> inner;
        for (std::size_t i = 0; i < m; ++i) {
            const double qi = benchmarks[i].value(lo);
            for (std::size_t j = i + 1; j < m; ++j) {
                const double qj = benchmarks[j].value(lo);
                if (qi == qj) continue;
                const double t = lo + (tails[i][k] - tails[j][k]) / (qi - qj);
                if (t > lo && t < hi) inner.push_back(t);
            }
        }
        std::sort(inner.begin(), inner.end());
        inner.erase(std::unique(inner.begin(), inner.end()), inner.end());

        auto g_at = [&](double t) {
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < m; ++j)
                best = std::max(best, tails[j][k] - (t - lo) * benchmarks[j].value(lo));
            return best;
        };
        xs.push_back(lo);
        ys.push_back(g_at(lo));
        for (double t : inner) {
            xs.push_back(t);
            ys.push_back(g_at(t));
        }
    }
    xs.push_back(1.0);
    ys.push_back(0.0);  // every tail integral vanishes at t = 1

    SampledFunction g{std::move(xs), std::move(ys)};
    const EnvelopeResult env = concave_envelope(g);

    // Qbar = -g'` (right derivative of the envelope), increasing by concavity.
    std::vector<double> vals(env.slopes.size());
    for (std::size_t k = 0; k < env.slopes.size(); ++k) vals[k] = -env.slopes[k];
    for (std::size_t k = 1; k < vals.size(); ++k) vals[k] = std::max(vals[k], vals[k - 1]);
    return StepQuantile(env.slope_bounds, std::move(vals)).simplified();
}

IcxSolution mv_solve_with_icx(const IcxProblem& p, double z, double tol) {
    if (!std::isfinite(z)) throw std::invalid_argument("mv_solve_with_icx: z must be finite");
    IcxSolution base = solve(p, tol);
    if (base.mean >= z - tol) return base;
    IcxProblem augmented = p;
    augmented.benchmark = reduce_benchmarks({p.benchmark, StepQuantile::constant(z)});
    return solve(augmented, tol);
}

}  // namespace icxopt
