#include "icxopt/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "icxopt/envelope.hpp"

namespace icxopt {

void IcxProblem::validate() const {
    if (!std::isfinite(budget)) throw std::invalid_argument("IcxProblem: budget must be finite");
    if (grid_size < 1 || grid_size > 100000000)
        throw std::invalid_argument("IcxProblem: grid_size out of range");
}

double PayoffPieces::value_at(const SdfModel& sdf, double s) const {
    if (!(s >= 0.0 && s < 1.0))
        throw std::invalid_argument("PayoffPieces::value_at: s outside [0,1)");
    auto it = std::upper_bound(bounds.begin(), bounds.end(), s);
    const double c = intercepts[static_cast<std::size_t>(it - bounds.begin()) - 1];
    if (kappa == 0.0) return c;
    return c - kappa * sdf.quantile_left_limit(1.0 - s);
}

namespace {

// Right derivative of the convex envelope of N_lambda, as a step function.
struct SlopeProfile {
    std::vector<double> bounds;  // m+1 abscissae, 0 ... 1
    std::vector<double> slopes;  // m nondecreasing slopes
    double e_rho = 0.0;          // E[rho] consistent with the evaluation mode
};

// ---------------------------------------------------------------------------
// Exact mode.  N_lambda is concave between benchmark breakpoints (the SDF
// term has a decreasing integrand), so the convex envelope touches N_lambda
// only at breakpoints; the hull over those exact vertices is grid-free.
// ---------------------------------------------------------------------------

SlopeProfile exact_profile(const IcxProblem& p, double lambda) {
    const StepQuantile q0 = p.benchmark.simplified();
    const auto& bp = q0.breakpoints();
    const auto& v = q0.values();

    SampledFunction f;
    f.grid = bp;
    f.values.resize(bp.size());
    f.values[0] = 0.0;
    double acc_q0 = 0.0;
    for (std::size_t i = 1; i < bp.size(); ++i) {
        acc_q0 += 2.0 * v[i - 1] * (bp[i] - bp[i - 1]);
        f.values[i] = lambda * p.sdf.tail_moment1(0.0, bp[i]) + acc_q0;
    }

    const EnvelopeResult env = convex_envelope(f);
    return {env.slope_bounds, env.slopes, p.sdf.e_rho()};
}

// ---------------------------------------------------------------------------
// Gridded mode.  n uniform cells split at the benchmark breakpoints, midpoint
// SDF sampling within each cell.  Splitting keeps every kink of the benchmark
// tail integral on a cell boundary, so the discretized ICX constraint is the
// true one there and the gridded optimum is feasible for the true benchmark.
// ---------------------------------------------------------------------------

struct GriddedWorkspace {
    std::vector<double> bounds;   // cell boundaries, 0 ... 1
    std::vector<double> rho_ref;  // Q_rho((1-m_j)-) at cell midpoints
    std::vector<double> cum_rho;  // cum_rho[j] = sum_{i<j} rho_ref[i] w_i
    std::vector<double> cum_q0;   //            = sum_{i<j} 2 Q0(m_i) w_i
    double e_rho = 0.0;           // grid quadrature of E[rho]

    std::size_t cells() const { return rho_ref.size(); }
    double width(std::size_t j) const { return bounds[j + 1] - bounds[j]; }
};

GriddedWorkspace make_workspace(const IcxProblem& p) {
    GriddedWorkspace ws;
    const int n = p.grid_size;
    ws.bounds.reserve(n + 1 + p.benchmark.breakpoints().size());
    for (int j = 0; j <= n; ++j) ws.bounds.push_back(static_cast<double>(j) / n);
    ws.bounds.insert(ws.bounds.end(), p.benchmark.breakpoints().begin(),
                     p.benchmark.breakpoints().end());
    std::sort(ws.bounds.begin(), ws.bounds.end());
    ws.bounds.erase(std::unique(ws.bounds.begin(), ws.bounds.end()), ws.bounds.end());

    const std::size_t m = ws.bounds.size() - 1;
    ws.rho_ref.resize(m);
    ws.cum_rho.resize(m + 1);
    ws.cum_q0.resize(m + 1);
    ws.cum_rho[0] = 0.0;
    ws.cum_q0[0] = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double w = ws.width(j);
        const double mid = 0.5 * (ws.bounds[j] + ws.bounds[j + 1]);
        ws.rho_ref[j] = p.sdf.quantile_left_limit(1.0 - mid);
        ws.cum_rho[j + 1] = ws.cum_rho[j] + ws.rho_ref[j] * w;
        ws.cum_q0[j + 1] = ws.cum_q0[j] + 2.0 * p.benchmark.value(mid) * w;
    }
    ws.e_rho = ws.cum_rho[m];
    return ws;
}

SlopeProfile gridded_profile(const GriddedWorkspace& ws, double lambda) {
    const std::size_t m = ws.cells();
    SampledFunction f;
    f.grid = ws.bounds;
    f.values.resize(m + 1);
    for (std::size_t j = 0; j <= m; ++j)
        f.values[j] = lambda * ws.cum_rho[j] + ws.cum_q0[j];
    const EnvelopeResult env = convex_envelope(f);
    return {env.slope_bounds, env.slopes, ws.e_rho};
}

SlopeProfile profile_for(const IcxProblem& p, double lambda) {
    if (p.mode == SolveMode::Exact) return exact_profile(p, lambda);
    return gridded_profile(make_workspace(p), lambda);
}

// ---------------------------------------------------------------------------
// beta step: h(beta) = lambda E[rho] - sum_k len_k (slope_k - 2 beta)^+ is
// piecewise linear and nondecreasing, so the root is solved segment-exactly.
// ---------------------------------------------------------------------------

double h_on_profile(const SlopeProfile& prof, double beta, double lambda) {
    double acc = 0.0;
    for (std::size_t k = 0; k < prof.slopes.size(); ++k) {
        const double excess = prof.slopes[k] - 2.0 * beta;
        if (excess > 0.0) acc += excess * (prof.bounds[k + 1] - prof.bounds[k]);
    }
    return lambda * prof.e_rho - acc;
}

double beta_root(const SlopeProfile& prof, double lambda) {
    const auto& s = prof.slopes;
    const std::size_t m = s.size();
    const double lam_e = lambda * prof.e_rho;

    std::vector<double> suf_ls(m + 1, 0.0), suf_l(m + 1, 0.0);
    for (std::size_t k = m; k-- > 0;) {
        const double len = prof.bounds[k + 1] - prof.bounds[k];
        suf_ls[k] = suf_ls[k + 1] + len * s[k];
        suf_l[k] = suf_l[k + 1] + len;
    }

    // h at knot 2*beta = s[k]; active slopes are those strictly above s[k].
    auto h_at_knot = [&](std::size_t k) {
        std::size_t j = k + 1;
        while (j < m && s[j] <= s[k]) ++j;
        return lam_e - (suf_ls[j] - s[k] * suf_l[j]);
    };

    std::size_t k = 0;
    while (k < m && h_at_knot(k) < 0.0) ++k;
    // root lies in (s[k-1], s[k]] with active set {i : s_i >= s[k]} (all i if k==0)
    std::size_t j0 = k;
    if (k < m)
        while (j0 > 0 && s[j0 - 1] >= s[k]) --j0;
    if (k == m) j0 = m;  // h positive beyond the last knot: root at the last segment
    if (suf_l[j0] <= 0.0)
        throw NumericalError("solve_center: degenerate slope profile");
    double beta = (suf_ls[j0] - lam_e) / (2.0 * suf_l[j0]);
    if (k < m && 2.0 * beta > s[k]) beta = s[k] / 2.0;
    if (k > 0 && 2.0 * beta < s[k - 1]) beta = s[k - 1] / 2.0;
    return beta;
}

// ---------------------------------------------------------------------------
// Assembly: quantile pieces, exact scalars, step-function emission.
// ---------------------------------------------------------------------------

PayoffPieces pieces_from(const SlopeProfile& prof, double beta, double lambda) {
    PayoffPieces pc;
    pc.bounds = prof.bounds;
    pc.kappa = lambda / 2.0;
    pc.intercepts.resize(prof.slopes.size());
    for (std::size_t k = 0; k < prof.slopes.size(); ++k)
        pc.intercepts[k] = beta + std::max(prof.slopes[k] - 2.0 * beta, 0.0) / 2.0;
    return pc;
}

struct Scalars {
    double mean = 0.0;
    double variance = 0.0;
    double budget = 0.0;
};

Scalars exact_scalars(const PayoffPieces& pc, const SdfModel& sdf) {
    const std::size_t m = pc.intercepts.size();
    const double e = sdf.e_rho();
    const double e2 = sdf.e_rho2();

    Scalars sc;
    std::vector<double> m1(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double len = pc.bounds[k + 1] - pc.bounds[k];
        m1[k] = sdf.tail_moment1(pc.bounds[k], pc.bounds[k + 1]);
        sc.mean += pc.intercepts[k] * len;
        sc.budget += pc.intercepts[k] * m1[k];
    }
    sc.mean -= pc.kappa * e;
    sc.budget -= pc.kappa * e2;

    if (m == 1) {
        sc.variance = pc.kappa * pc.kappa * sdf.var_rho();
    } else {
        double acc = pc.kappa * pc.kappa * e2;
        for (std::size_t k = 0; k < m; ++k) {
            const double d = pc.intercepts[k] - sc.mean;
            acc += d * d * (pc.bounds[k + 1] - pc.bounds[k]) - 2.0 * pc.kappa * d * m1[k];
        }
        sc.variance = std::max(0.0, acc);
    }
    return sc;
}

// Exact steps for a discrete SDF; exact per-cell averages otherwise.  The
// averaging grid is the uniform grid joined with the benchmark breakpoints,
// so every tail integral of the emitted step function equals the continuum
// payoff's tail integral at each cell boundary and at each kink of the
// benchmark constraint.
StepQuantile emit_exact(const PayoffPieces& pc, const SdfModel& sdf, int grid_size,
                        const std::vector<double>& benchmark_breakpoints) {
    if (sdf.is_discrete()) {
        const auto& qr = std::get<DiscreteSdf>(sdf.model()).quantile;
        std::vector<double> pts = pc.bounds;
        for (std::size_t i = 1; i + 1 < qr.breakpoints().size(); ++i)
            pts.push_back(1.0 - qr.breakpoints()[i]);
        pts.insert(pts.end(), benchmark_breakpoints.begin(), benchmark_breakpoints.end());
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

        std::vector<double> vals(pts.size() - 1);
        std::size_t piece = 0;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            while (pc.bounds[piece + 1] <= pts[i]) ++piece;
            double v = pc.intercepts[piece];
            if (pc.kappa != 0.0)
                v -= pc.kappa * sdf.quantile_left_limit(1.0 - pts[i]);
            if (i > 0) v = std::max(v, vals[i - 1]);  // guard float rounding
            vals[i] = v;
        }
        return StepQuantile(std::move(pts), std::move(vals));
    }

    const int n = grid_size;
    std::vector<double> pts;
    pts.reserve(n + 1 + pc.bounds.size() + benchmark_breakpoints.size());
    for (int j = 0; j <= n; ++j) pts.push_back(static_cast<double>(j) / n);
    pts.insert(pts.end(), pc.bounds.begin(), pc.bounds.end());
    pts.insert(pts.end(), benchmark_breakpoints.begin(), benchmark_breakpoints.end());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    std::vector<double> vals(pts.size() - 1);
    std::size_t piece = 0;
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
        const double lo = pts[j];
        const double hi = pts[j + 1];
        while (pc.bounds[piece + 1] <= lo) ++piece;
        const double avg = pc.intercepts[piece] -
                           pc.kappa * sdf.tail_moment1(lo, hi) / (hi - lo);
        vals[j] = std::max(avg, prev);
        prev = vals[j];
    }
    return StepQuantile(std::move(pts), std::move(vals));
}

std::vector<double> gridded_values(const GriddedWorkspace& ws, const SlopeProfile& prof,
                                   double beta, double lambda) {
    const std::size_t m = ws.cells();
    std::vector<double> vals(m);
    std::size_t seg = 0;
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
        const double mid = 0.5 * (ws.bounds[j] + ws.bounds[j + 1]);
        while (prof.bounds[seg + 1] <= mid) ++seg;
        double v = beta + std::max(prof.slopes[seg] - 2.0 * beta, 0.0) / 2.0 -
                   lambda / 2.0 * ws.rho_ref[j];
        if (v < prev) v = prev;
        vals[j] = v;
        prev = v;
    }
    return vals;
}

Scalars gridded_scalars(const GriddedWorkspace& ws, const std::vector<double>& vals) {
    Scalars sc;
    double second = 0.0;
    for (std::size_t j = 0; j < ws.cells(); ++j) {
        const double w = ws.width(j);
        sc.mean += vals[j] * w;
        second += vals[j] * vals[j] * w;
        sc.budget += vals[j] * ws.rho_ref[j] * w;
    }
    sc.variance = std::max(0.0, second - sc.mean * sc.mean);
    return sc;
}

IcxSolution assemble(const IcxProblem& p, double lambda, double beta,
                     const SlopeProfile& prof, CaseTag tag, std::string detail) {
    const PayoffPieces pc = pieces_from(prof, beta, lambda);
    if (p.mode == SolveMode::Exact) {
        const Scalars sc = exact_scalars(pc, p.sdf);
        IcxSolution sol{emit_exact(pc, p.sdf, p.grid_size, p.benchmark.breakpoints()),
                        lambda,
                        beta,
                        sc.variance,
                        sc.budget,
                        sc.mean,
                        tag,
                        std::move(detail),
                        pc,
                        std::nullopt};
        return sol;
    }
    const GriddedWorkspace ws = make_workspace(p);
    const std::vector<double> vals = gridded_values(ws, prof, beta, lambda);
    const Scalars sc = gridded_scalars(ws, vals);
    IcxSolution sol{StepQuantile(ws.bounds, vals),
                    lambda,
                    beta,
                    sc.variance,
                    sc.budget,
                    sc.mean,
                    tag,
                    std::move(detail),
                    std::nullopt,
                    std::nullopt};
    return sol;
}

IcxSolution assemble_from_pieces(const IcxProblem& p, double lambda, double beta,
                                 PayoffPieces pc, CaseTag tag, std::string detail) {
    const Scalars sc = exact_scalars(pc, p.sdf);
    return IcxSolution{emit_exact(pc, p.sdf, p.grid_size, p.benchmark.breakpoints()),
                       lambda,
                       beta,
                       sc.variance,
                       sc.budget,
                       sc.mean,
                       tag,
                       std::move(detail),
                       std::move(pc),
                       std::nullopt};
}

IcxSolution trivial_solution(const IcxProblem& p) {
    const double c = p.budget / p.sdf.e_rho();
    PayoffPieces pc{{0.0, 1.0}, {c}, 0.0};
    IcxSolution sol{StepQuantile::constant(c),
                    0.0,
                    c,
                    0.0,
                    c * p.sdf.e_rho(),
                    c,
                    CaseTag::Trivial,
                    "",
                    std::move(pc),
                    std::make_pair(p.benchmark.top(), c)};
    return sol;
}

}  // namespace

StepQuantile fixed_multiplier_quantile(const IcxProblem& p, double beta, double lambda) {
    p.validate();
    if (!(lambda > 0.0))
        throw std::invalid_argument("fixed_multiplier_quantile: lambda must be positive");
    if (p.mode == SolveMode::Exact) {
        const SlopeProfile prof = exact_profile(p, lambda);
        return emit_exact(pieces_from(prof, beta, lambda), p.sdf, p.grid_size,
                          p.benchmark.breakpoints());
    }
    const GriddedWorkspace ws = make_workspace(p);
    const SlopeProfile prof = gridded_profile(ws, lambda);
    return StepQuantile(ws.bounds, gridded_values(ws, prof, beta, lambda));
}

double center_gradient(const IcxProblem& p, double beta, double lambda) {
    p.validate();
    if (!(lambda > 0.0))
        throw std::invalid_argument("center_gradient: lambda must be positive");
    return h_on_profile(profile_for(p, lambda), beta, lambda);
}

double solve_center(const IcxProblem& p, double lambda, double tol) {
    p.validate();
    if (!(lambda > 0.0))
        throw std::invalid_argument("solve_center: lambda must be positive");
    const SlopeProfile prof = profile_for(p, lambda);
    const double beta = beta_root(prof, lambda);
    if (!(std::abs(h_on_profile(prof, beta, lambda)) <=
          std::max(tol, 1e-12 * (1.0 + lambda * prof.e_rho))))
        throw NumericalError("solve_center: residual above tolerance");
    return beta;
}

double budget_of_lambda(const IcxProblem& p, double lambda) {
    p.validate();
    if (!(lambda > 0.0))
        throw std::invalid_argument("budget_of_lambda: lambda must be positive");
    if (p.mode == SolveMode::Exact) {
        const SlopeProfile prof = exact_profile(p, lambda);
        const double beta = beta_root(prof, lambda);
        return exact_scalars(pieces_from(prof, beta, lambda), p.sdf).budget;
    }
    const GriddedWorkspace ws = make_workspace(p);
    const SlopeProfile prof = gridded_profile(ws, lambda);
    const double beta = beta_root(prof, lambda);
    return gridded_scalars(ws, gridded_values(ws, prof, beta, lambda)).budget;
}

IcxSolution two_point_closed_form(const IcxProblem& p) {
    p.validate();
    const StepQuantile q0 = p.benchmark.simplified();
    if (q0.step_count() != 2)
        throw std::invalid_argument("two_point_closed_form: benchmark must have two atoms");
    const double a = q0.values()[0];
    const double b = q0.values()[1];
    const double pr = q0.breakpoints()[1];
    const double x = p.budget;

    const double e = p.sdf.e_rho();
    const double e2 = p.sdf.e_rho2();
    const double var = p.sdf.var_rho();
    if (x >= b * e)
        throw std::invalid_argument("two_point_closed_form: trivial branch applies (x >= b E[rho])");

    const auto [a1, a2] = p.sdf.tail_averages(pr);
    const double ex0 = pr * a + (1.0 - pr) * b;
    const double d = (1.0 - pr) * e2 + pr * pr * a1 * a1 - (1.0 - pr) * (1.0 - pr) * a2 * a2;
    const double x_ab = ex0 * e - (b - a) / (a1 - a2) * var;
    const double x_bc = b * e - (b - a) / a1 * d;

    double kappa, beta;
    PayoffPieces pc;
    std::string detail;
    if (x <= x_ab) {
        detail = "a";
        kappa = (ex0 * e - x) / var;
        beta = ex0;
        pc = PayoffPieces{{0.0, 1.0}, {ex0 + kappa * e}, kappa};
    } else if (x <= x_bc) {
        detail = "b";
        kappa = (a * pr * a1 + b * (1.0 - pr) * a2 - x) /
                (e2 - pr * a1 * a1 - (1.0 - pr) * a2 * a2);
        beta = ex0;
        pc = PayoffPieces{{0.0, pr, 1.0}, {a + kappa * a1, b + kappa * a2}, kappa};
    } else {
        detail = "c";
        kappa = (1.0 - pr) * (b * e - x) / d;
        beta = b - kappa * pr * a1 / (1.0 - pr);
        pc = PayoffPieces{{0.0, pr, 1.0}, {beta, b + kappa * a2}, kappa};
    }
    return assemble_from_pieces(p, 2.0 * kappa, beta, std::move(pc),
                                CaseTag::ClosedFormTwoPoint, std::move(detail));
}

IcxSolution solve_general(const IcxProblem& p, double budget_tol) {
    p.validate();
    const double x = p.budget;
    if (p.benchmark.top() * p.sdf.e_rho() <= x) return trivial_solution(p);

    auto budget_at = [&](double lam) { return budget_of_lambda(p, lam); };

    double lo = 1e-8, hi = 1.0;
    while (budget_at(hi) >= x) {
        hi *= 2.0;
        if (hi > 1e12) throw NumericalError("solve_general: no upper bracket for lambda");
    }
    while (budget_at(lo) <= x) {
        lo /= 2.0;
        if (lo < 1e-300)
            throw NumericalError("solve_general: budget limit at lambda->0 does not exceed x");
    }
    const double tol = budget_tol * (1.0 + std::abs(x));
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double bud = budget_at(mid);
        if (std::abs(bud - x) <= tol) break;
        (bud > x ? lo : hi) = mid;
    }

    const SlopeProfile prof = profile_for(p, mid);
    const double beta = beta_root(prof, mid);
    IcxSolution sol = assemble(p, mid, beta, prof, CaseTag::General, "");
    if (std::abs(sol.budget_used - x) > std::max(tol, 1e-6 * (1.0 + std::abs(x))))
        throw NumericalError("solve_general: budget did not converge");
    return sol;
}

IcxSolution solve(const IcxProblem& p, double budget_tol) {
    p.validate();
    const double x = p.budget;
    const double e = p.sdf.e_rho();

    if (p.benchmark.top() * e <= x) return trivial_solution(p);

    const StepQuantile q0 = p.benchmark.simplified();
    if (q0.step_count() == 1) {
        const double z = q0.values()[0];
        const double kappa = (z * e - x) / p.sdf.var_rho();
        PayoffPieces pc{{0.0, 1.0}, {z + kappa * e}, kappa};
        return assemble_from_pieces(p, 2.0 * kappa, z, std::move(pc),
                                    CaseTag::ClosedFormConstant, "");
    }
    if (q0.step_count() == 2) return two_point_closed_form(p);
    return solve_general(p, budget_tol);
}

}  // namespace icxopt
