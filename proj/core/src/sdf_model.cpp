#include "icxopt/sdf_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "icxopt/normal.hpp"

namespace icxopt {

namespace {

// Phi(Phi^{-1}(a) - shift) with the closed [0,1] endpoints handled.
double phi_shifted(double a, double shift) {
    if (a <= 0.0) return 0.0;
    if (a >= 1.0) return 1.0;
    return norm_cdf(norm_ppf(a) - shift);
}

// int over u in [a,b] of Q(u)^2 for a step quantile.
double step_second_partial(const StepQuantile& q, double a, double b) {
    double acc = 0.0;
    const auto& bp = q.breakpoints();
    const auto& v = q.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double lo = std::max(bp[i], a);
        const double hi = std::min(bp[i + 1], b);
        if (hi > lo) acc += v[i] * v[i] * (hi - lo);
    }
    return acc;
}

}  // namespace

SdfModel::SdfModel(std::variant<LogNormalSdf, DiscreteSdf> m) : model_(std::move(m)) {
    if (const auto* ln = std::get_if<LogNormalSdf>(&model_)) {
        if (!(ln->sigma > 0.0) || !std::isfinite(ln->mu) || !std::isfinite(ln->sigma))
            throw std::invalid_argument("SdfModel: log-normal requires finite mu, sigma > 0");
        const double e = std::exp(ln->mu + ln->sigma * ln->sigma / 2.0);
        const double e2 = std::exp(2.0 * ln->mu + 2.0 * ln->sigma * ln->sigma);
        moments_ = {e, e2, e2 - e * e};
    } else {
        const auto& q = std::get<DiscreteSdf>(model_).quantile;
        if (!(q.bottom() > 0.0))
            throw std::invalid_argument("SdfModel: discrete SDF must be strictly positive");
        const double e = q.mean();
        const double e2 = q.second_moment();
        const double var = e2 - e * e;
        if (!(var > 0.0))
            throw std::invalid_argument("SdfModel: SDF must be non-constant (Var[rho] > 0)");
        moments_ = {e, e2, var};
    }
}

SdfModel SdfModel::log_normal(double mu, double sigma) {
    return SdfModel(LogNormalSdf{mu, sigma});
}

SdfModel SdfModel::discrete(StepQuantile quantile) {
    return SdfModel(DiscreteSdf{std::move(quantile)});
}

bool SdfModel::is_discrete() const {
    return std::holds_alternative<DiscreteSdf>(model_);
}

double SdfModel::quantile(double s) const {
    if (const auto* ln = std::get_if<LogNormalSdf>(&model_)) {
        if (!(s >= 0.0 && s < 1.0))
            throw std::invalid_argument("SdfModel::quantile: log-normal needs s in [0,1)");
        if (s == 0.0) return 0.0;  // infimum of the support
        return std::exp(ln->mu + ln->sigma * norm_ppf(s));
    }
    return std::get<DiscreteSdf>(model_).quantile.value(s);
}

double SdfModel::quantile_left_limit(double s) const {
    if (const auto* ln = std::get_if<LogNormalSdf>(&model_)) {
        if (!(s > 0.0 && s < 1.0))
            throw std::invalid_argument(
                "SdfModel::quantile_left_limit: log-normal needs s in (0,1)");
        return std::exp(ln->mu + ln->sigma * norm_ppf(s));
    }
    return std::get<DiscreteSdf>(model_).quantile.left_limit(s);
}

TailAverages SdfModel::tail_averages(double p) const {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("SdfModel::tail_averages: p outside (0,1)");
    return {tail_moment1(0.0, p) / p, tail_moment1(p, 1.0) / (1.0 - p)};
}

double SdfModel::tail_moment1(double s1, double s2) const {
    if (!(s1 >= 0.0 && s1 <= s2 && s2 <= 1.0))
        throw std::invalid_argument("SdfModel::tail_moment1: need 0 <= s1 <= s2 <= 1");
    if (const auto* ln = std::get_if<LogNormalSdf>(&model_)) {
        // int_{1-s2}^{1-s1} Q_rho(u) du
        return moments_.e_rho *
               (phi_shifted(1.0 - s1, ln->sigma) - phi_shifted(1.0 - s2, ln->sigma));
    }
    const auto& q = std::get<DiscreteSdf>(model_).quantile;
    return q.tail_integral(1.0 - s2) - q.tail_integral(1.0 - s1);
}

double SdfModel::tail_moment2(double s1, double s2) const {
    if (!(s1 >= 0.0 && s1 <= s2 && s2 <= 1.0))
        throw std::invalid_argument("SdfModel::tail_moment2: need 0 <= s1 <= s2 <= 1");
    if (const auto* ln = std::get_if<LogNormalSdf>(&model_)) {
        return moments_.e_rho2 * (phi_shifted(1.0 - s1, 2.0 * ln->sigma) -
                                  phi_shifted(1.0 - s2, 2.0 * ln->sigma));
    }
    const auto& q = std::get<DiscreteSdf>(model_).quantile;
    return step_second_partial(q, 1.0 - s2, 1.0 - s1);
}

}  // namespace icxopt
