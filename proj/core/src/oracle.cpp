#include "icxopt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace icxopt {

namespace {

// Isotonic regression (pool adjacent violators), uniform weights.
void pava_increasing(const std::vector<double>& y, std::vector<double>& out,
                     std::vector<double>& vals, std::vector<int>& wts) {
    const std::size_t n = y.size();
    std::ptrdiff_t k = -1;
    for (std::size_t i = 0; i < n; ++i) {
        double v = y[i];
        int w = 1;
        while (k >= 0 && vals[k] >= v) {
            v = (vals[k] * wts[k] + v * w) / (wts[k] + w);
            w += wts[k];
            --k;
        }
        ++k;
        vals[k] = v;
        wts[k] = w;
    }
    std::size_t pos = 0;
    for (std::ptrdiff_t j = 0; j <= k; ++j)
        for (int c = 0; c < wts[j]; ++c) out[pos++] = vals[j];
}

struct Discretization {
    int n = 0;
    std::vector<double> rho;        // Q_rho(1 - m_j) at cell midpoints (price weights * n)
    std::vector<int> rows;          // tail-row boundary indices
    std::vector<double> row_bound;  // int_{i/n}^1 Q_0 per row
    std::vector<double> row_norm2;  // (n - i) / n^2 per row
    double bud_norm2 = 0.0;         // |r/n|^2
};

Discretization discretize(const IcxProblem& p, int n) {
    Discretization d;
    d.n = n;
    d.rho.resize(n);
    for (int j = 0; j < n; ++j) d.rho[j] = p.sdf.quantile(1.0 - (j + 0.5) / n);

    // Tail rows at every 10th cell boundary plus both boundaries enclosing
    // each benchmark breakpoint; the mean row (i = 0) is always present.
    std::vector<int> rows{0};
    for (int i = 10; i < n; i += 10) rows.push_back(i);
    const auto& bp = p.benchmark.breakpoints();
    for (std::size_t k = 1; k + 1 < bp.size(); ++k) {
        const int lo = static_cast<int>(std::floor(bp[k] * n));
        const int hi = static_cast<int>(std::ceil(bp[k] * n));
        if (lo > 0 && lo < n) rows.push_back(lo);
        if (hi > 0 && hi < n) rows.push_back(hi);
    }
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    d.rows = std::move(rows);

    d.row_bound.resize(d.rows.size());
    d.row_norm2.resize(d.rows.size());
    for (std::size_t k = 0; k < d.rows.size(); ++k) {
        d.row_bound[k] = p.benchmark.tail_integral(static_cast<double>(d.rows[k]) / n);
        d.row_norm2[k] = static_cast<double>(n - d.rows[k]) / (static_cast<double>(n) * n);
    }
    double r2 = 0.0;
    for (double r : d.rho) r2 += r * r;
    d.bud_norm2 = r2 / (static_cast<double>(n) * n);
    return d;
}

struct ProjectionScratch {
    std::vector<double> p_mono, lam_tail, y, out, vals;
    std::vector<int> wts;
};

// Dykstra projection of the constant vector m*1 onto the feasible set.
// Returns the number of cycles used; q holds the projection.
long project_feasible(const Discretization& d, double x, double m, double inner_tol,
                      int max_cycles, std::vector<double>& q, ProjectionScratch& s) {
    const int n = d.n;
    const std::size_t nrows = d.rows.size();
    q.assign(n, m);
    s.p_mono.assign(n, 0.0);
    s.lam_tail.assign(nrows, 0.0);
    s.y.resize(n);
    s.out.resize(n);
    s.vals.resize(n);
    s.wts.resize(n);
    double lam_bud = 0.0;

    long cycles = 0;
    for (int cycle = 0; cycle < max_cycles; ++cycle) {
        ++cycles;
        double delta = 0.0;

        for (int i = 0; i < n; ++i) s.y[i] = q[i] + s.p_mono[i];
        pava_increasing(s.y, s.out, s.vals, s.wts);
        for (int i = 0; i < n; ++i) {
            delta = std::max(delta, std::abs(s.out[i] - q[i]));
            q[i] = s.out[i];
            s.p_mono[i] = s.y[i] - s.out[i];
        }

        // tail half-spaces sum_{j>=i} q_j / n >= B_i (correction -lam * a)
        for (std::size_t k = 0; k < nrows; ++k) {
            const int i = d.rows[k];
            double sum = 0.0;
            for (int j = i; j < n; ++j) sum += q[j];
            const double a_ty = sum / n - s.lam_tail[k] * d.row_norm2[k];
            const double lam_new = std::max(0.0, (d.row_bound[k] - a_ty) / d.row_norm2[k]);
            const double step = (lam_new - s.lam_tail[k]) / n;
            if (step != 0.0) {
                delta = std::max(delta, std::abs(step));
                for (int j = i; j < n; ++j) q[j] += step;
            }
            s.lam_tail[k] = lam_new;
        }

        // budget half-space sum r_j q_j / n <= x (correction +lam * a)
        double rq = 0.0;
        for (int j = 0; j < n; ++j) rq += d.rho[j] * q[j];
        const double a_ty = rq / n + lam_bud * d.bud_norm2;
        const double lam_new = std::max(0.0, (a_ty - x) / d.bud_norm2);
        const double dstep = lam_new - lam_bud;
        if (dstep != 0.0) {
            for (int j = 0; j < n; ++j) {
                const double move = dstep * d.rho[j] / n;
                delta = std::max(delta, std::abs(move));
                q[j] -= move;
            }
        }
        lam_bud = lam_new;

        if (delta < inner_tol) break;
    }
    return cycles;
}

double feasibility_residual(const Discretization& d, double x, const std::vector<double>& q) {
    const int n = d.n;
    double worst = 0.0;
    for (std::size_t k = 0; k < d.rows.size(); ++k) {
        double sum = 0.0;
        for (int j = d.rows[k]; j < n; ++j) sum += q[j];
        worst = std::max(worst, d.row_bound[k] - sum / n);
    }
    double rq = 0.0;
    for (int j = 0; j < n; ++j) rq += d.rho[j] * q[j];
    worst = std::max(worst, rq / n - x);
    for (int j = 0; j + 1 < n; ++j) worst = std::max(worst, q[j] - q[j + 1]);
    return std::max(0.0, worst);
}

double mean_of(const std::vector<double>& q) {
    double s = 0.0;
    for (double v : q) s += v;
    return s / static_cast<double>(q.size());
}

}  // namespace

OracleResult oracle_solve(const IcxProblem& p, int n, const OracleOptions& opts) {
    p.validate();
    if (n < 50) throw std::invalid_argument("oracle_solve: grid size must be at least 50");

    const Discretization d = discretize(p, n);
    const double x = p.budget;

    // The gradient step at 1/L (L = 2/n) maps any q to mean(q)*1, so the
    // projected-gradient iteration is q <- P_C(mean(q) 1).  Its fixed points
    // are exactly the KKT points, and m -> mean(P_C(m 1)) - m is continuous
    // and nonincreasing (P_C is firmly nonexpansive), so the fixed point is
    // found by bracketing and bisection on the scalar mean.
    std::vector<double> q;
    ProjectionScratch scratch;
    long total = 0;

    auto g_of = [&](double m) {
        total += project_feasible(d, x, m, opts.inner_tol, opts.max_cycles_per_projection,
                                  q, scratch);
        return mean_of(q) - m;
    };

    OracleResult res;
    res.grid_size = n;

    const double m0 = x / p.sdf.e_rho();
    double lo = m0, hi = m0;
    double g = g_of(m0);
    if (g > 0.0) {
        while (g > 0.0 && total < opts.max_total_cycles) {
            lo = hi;
            hi += std::max(1.0, std::abs(hi));
            g = g_of(hi);
        }
    } else if (g < 0.0) {
        while (g < 0.0 && total < opts.max_total_cycles) {
            hi = lo;
            lo -= std::max(1.0, std::abs(lo));
            g = g_of(lo);
        }
    }
    double m_final = (g >= 0.0) ? hi : lo;
    while (hi - lo > 1e-13 * (1.0 + std::abs(hi)) && total < opts.max_total_cycles) {
        const double mid = 0.5 * (lo + hi);
        m_final = mid;
        if (g_of(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    g = g_of(m_final);

    res.cycles = total;
    res.kkt_residual = std::abs(g);
    res.feasibility_residual = feasibility_residual(d, x, q);
    res.converged = res.kkt_residual <= opts.tol && res.feasibility_residual <= opts.tol &&
                    total < opts.max_total_cycles;
    res.q = q;
    res.mean = mean_of(q);
    double second = 0.0, rq = 0.0;
    for (int j = 0; j < n; ++j) {
        second += q[j] * q[j];
        rq += q[j] * d.rho[j];
    }
    res.variance = std::max(0.0, second / n - res.mean * res.mean);
    res.budget = rq / n;

    if (!res.converged) {
        std::ostringstream msg;
        msg << "oracle_solve: not converged after " << total
            << " cycles (kkt=" << res.kkt_residual
            << ", feas=" << res.feasibility_residual << ")";
        res.diagnostic = msg.str();
        throw NumericalError(res.diagnostic);
    }
    return res;
}

OracleReport oracle_check(const IcxSolution& sol, const IcxProblem& p, int n, double tol,
                          const OracleOptions& opts) {
    OracleReport rep;
    OracleResult orc = oracle_solve(p, n, opts);
    rep.oracle_variance = orc.variance;

    // Recompute everything from q_star; the solution's own scalars are not
    // trusted.
    const StepQuantile& qs = sol.q_star;
    rep.solution_variance = qs.variance();
    rep.variance_rel_diff = std::abs(rep.solution_variance - orc.variance) /
                            std::max(orc.variance, 1e-12);
    rep.variance_ok = rep.variance_rel_diff <= tol;

    double rq = 0.0, sup = 0.0;
    for (int j = 0; j < n; ++j) {
        const double mid = (j + 0.5) / n;
        const double v = qs.value(mid);
        rq += v * p.sdf.quantile(1.0 - mid);
        sup = std::max(sup, std::abs(v - orc.q[j]));
    }
    rep.budget_recomputed = rq / n;
    // Both prices use the same quadrature, so the grid bias cancels; a good
    // solution sits at or below the oracle's binding budget.
    rep.budget_gap = std::max(0.0, rep.budget_recomputed - std::max(orc.budget, p.budget));
    rep.budget_ok = rep.budget_gap <= 2e-4 * (1.0 + std::abs(p.budget));
    rep.curve_sup_diff = sup;
    rep.curve_ok = sup <= 0.05 * (1.0 + std::abs(p.benchmark.top()));

    const double icx_tol = 1e-6 * (1.0 + std::abs(p.benchmark.top()));
    rep.icx_ok = icx_dominates(qs, p.benchmark, icx_tol);
    if (!rep.icx_ok) {
        // measure the worst shortfall for the report
        double worst = 0.0;
        for (double t : union_breakpoints(qs, p.benchmark))
            worst = std::max(worst, p.benchmark.tail_integral(t) - qs.tail_integral(t));
        rep.icx_shortfall = worst;
    }

    rep.pass = rep.variance_ok && rep.budget_ok && rep.icx_ok && rep.curve_ok;
    std::ostringstream msg;
    msg << (rep.pass ? "PASS" : "FAIL") << ": variance " << rep.solution_variance
        << " vs oracle " << orc.variance << " (rel " << rep.variance_rel_diff
        << "), budget gap " << rep.budget_gap << ", icx "
        << (rep.icx_ok ? "ok" : "violated") << ", curve sup " << rep.curve_sup_diff;
    rep.summary = msg.str();
    return rep;
}

}  // namespace icxopt
