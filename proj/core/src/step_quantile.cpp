#include "icxopt/step_quantile.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace icxopt {

namespace {

void validate(const std::vector<double>& bp, const std::vector<double>& v) {
    if (bp.size() < 2 || v.size() + 1 != bp.size())
        throw std::invalid_argument("StepQuantile: need k values and k+1 breakpoints");
    if (bp.front() != 0.0 || bp.back() != 1.0)
        throw std::invalid_argument("StepQuantile: breakpoints must start at 0 and end at 1");
    for (std::size_t i = 0; i + 1 < bp.size(); ++i)
        if (!(bp[i] < bp[i + 1]))
            throw std::invalid_argument("StepQuantile: breakpoints must be strictly increasing");
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i]))
            throw std::invalid_argument("StepQuantile: values must be finite");
        if (i > 0 && v[i] < v[i - 1])
            throw std::invalid_argument("StepQuantile: values must be weakly increasing");
    }
}

}  // namespace

StepQuantile::StepQuantile(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
    validate(breakpoints_, values_);
}

StepQuantile StepQuantile::constant(double c) {
    return StepQuantile({0.0, 1.0}, {c});
}

StepQuantile StepQuantile::two_point(double a, double b, double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("two_point: p must lie in (0,1)");
    if (a > b) throw std::invalid_argument("two_point: requires a <= b");
    return StepQuantile({0.0, p, 1.0}, {a, b});
}

StepQuantile StepQuantile::from_atoms(const std::vector<double>& atoms,
                                      const std::vector<double>& probs) {
    if (atoms.empty() || atoms.size() != probs.size())
        throw std::invalid_argument("from_atoms: atoms/probs size mismatch");
    double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("from_atoms: probabilities must sum to 1");
    std::vector<double> bp;
    bp.reserve(atoms.size() + 1);
    bp.push_back(0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        acc += probs[i];
        bp.push_back(acc);
    }
    bp.push_back(1.0);
    return StepQuantile(std::move(bp), atoms);
}

StepQuantile StepQuantile::from_uniform_cells(std::vector<double> cell_values) {
    const std::size_t n = cell_values.size();
    if (n == 0) throw std::invalid_argument("from_uniform_cells: empty");
    std::vector<double> bp(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        bp[i] = static_cast<double>(i) / static_cast<double>(n);
    bp[0] = 0.0;
    bp[n] = 1.0;
    return StepQuantile(std::move(bp), std::move(cell_values));
}

double StepQuantile::value(double s) const {
    if (!(s >= 0.0 && s <= 1.0))
        throw std::invalid_argument("StepQuantile::value: s outside [0,1]");
    if (s >= 1.0) return values_.back();  // Q(1) := Q(1-)
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), s);
    return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

double StepQuantile::left_limit(double s) const {
    if (!(s > 0.0 && s <= 1.0))
        throw std::invalid_argument("StepQuantile::left_limit: s outside (0,1]");
    auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), s);
    // s in (t_{i-1}, t_i]  ->  it points at t_i  ->  step i-1
    return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

double StepQuantile::tail_integral(double t) const {
    if (!(t >= 0.0 && t <= 1.0))
        throw std::invalid_argument("StepQuantile::tail_integral: t outside [0,1]");
    double acc = 0.0;
    for (std::size_t i = values_.size(); i-- > 0;) {
        const double lo = breakpoints_[i];
        const double hi = breakpoints_[i + 1];
        if (hi <= t) break;
        acc += values_[i] * (hi - std::max(lo, t));
    }
    return acc;
}

double StepQuantile::expected_upside(double q) const {
    if (!(q >= 0.0 && q < 1.0))
        throw std::invalid_argument("StepQuantile::expected_upside: q outside [0,1)");
    return tail_integral(q);
}

double StepQuantile::second_moment() const {
    double acc = 0.0;
    for (std::size_t i = values_.size(); i-- > 0;)
        acc += values_[i] * values_[i] * (breakpoints_[i + 1] - breakpoints_[i]);
    return acc;
}

double StepQuantile::variance() const {
    const double m = mean();
    return std::max(0.0, second_moment() - m * m);
}

double StepQuantile::realize_payoff(double u) const {
    if (!(u > 0.0 && u < 1.0))
        throw std::invalid_argument("StepQuantile::realize_payoff: u outside (0,1)");
    return value(1.0 - u);
}

StepQuantile StepQuantile::shifted(double c) const {
    std::vector<double> v = values_;
    for (double& x : v) x += c;
    return StepQuantile(breakpoints_, std::move(v));
}

StepQuantile StepQuantile::simplified() const {
    std::vector<double> bp{breakpoints_.front()};
    std::vector<double> v;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!v.empty() && v.back() == values_[i]) {
            bp.back() = breakpoints_[i + 1];  // extend the previous step
        } else {
            v.push_back(values_[i]);
            bp.push_back(breakpoints_[i + 1]);
        }
    }
    return StepQuantile(std::move(bp), std::move(v));
}

std::vector<double> union_breakpoints(const StepQuantile& a, const StepQuantile& b) {
    std::vector<double> u;
    u.reserve(a.breakpoints().size() + b.breakpoints().size());
    std::merge(a.breakpoints().begin(), a.breakpoints().end(),
               b.breakpoints().begin(), b.breakpoints().end(), std::back_inserter(u));
    u.erase(std::unique(u.begin(), u.end()), u.end());
    return u;
}

bool icx_dominates(const StepQuantile& q, const StepQuantile& q0, double tol) {
    const std::vector<double> pts = union_breakpoints(q, q0);
    // Single backward sweep accumulating both tail integrals exactly.
    double tail_q = 0.0, tail_q0 = 0.0;
    std::size_t iq = q.step_count();
    std::size_t i0 = q0.step_count();
    for (std::size_t k = pts.size() - 1; k-- > 0;) {
        const double lo = pts[k], hi = pts[k + 1];
        while (iq > 0 && q.breakpoints()[iq - 1] >= hi) --iq;
        while (i0 > 0 && q0.breakpoints()[i0 - 1] >= hi) --i0;
        tail_q += q.values()[iq - 1] * (hi - lo);
        tail_q0 += q0.values()[i0 - 1] * (hi - lo);
        if (tail_q < tail_q0 - tol) return false;
    }
    return true;
}

}  // namespace icxopt
