#pragma once

#include <variant>

#include "icxopt/step_quantile.hpp"

namespace icxopt {

/// Log-normal stochastic discount factor: log(rho) ~ N(mu, sigma^2).
struct LogNormalSdf {
    double mu;
    double sigma;
};

/// Discrete stochastic discount factor given by its quantile function.
struct DiscreteSdf {
    StepQuantile quantile;
};

struct SdfMoments {
    double e_rho;    // E[rho]
    double e_rho2;   // E[rho^2]
    double var_rho;  // Var[rho]
};

struct TailAverages {
    double a1;  // (1/p)     int_0^p Q_rho(1-s) ds  (average over the top tail)
    double a2;  // (1/(1-p)) int_p^1 Q_rho(1-s) ds
};

/// Stochastic discount factor model: quantile Q_rho, left limits
/// Q_rho((1-s)-), and exact moments.  rho must be a.s. positive with
/// Var[rho] > 0.  Immutable after construction; all evaluations are pure.
class SdfModel {
public:
    static SdfModel log_normal(double mu, double sigma);
    static SdfModel discrete(StepQuantile quantile);

    /// Q_rho(s).  LogNormal: s in [0,1) (s = 1 is a domain error, the right
    /// tail is unbounded).  Discrete: s in [0,1].
    double quantile(double s) const;

    /// Left limit Q_rho(s-), s in (0,1].  Equals quantile() for the
    /// log-normal model on (0,1); for a discrete model, the value of the
    /// step strictly below s.
    double quantile_left_limit(double s) const;

    SdfMoments moments() const { return moments_; }
    double e_rho() const { return moments_.e_rho; }
    double e_rho2() const { return moments_.e_rho2; }
    double var_rho() const { return moments_.var_rho; }

    /// Conditional averages of Q_rho(1-s) over [0,p) and [p,1); p in (0,1).
    /// Always a1 > a2.
    TailAverages tail_averages(double p) const;

    /// int_{s1}^{s2} Q_rho(1-t) dt, exact (closed form for log-normal,
    /// step sums for discrete).  Requires 0 <= s1 <= s2 <= 1.
    double tail_moment1(double s1, double s2) const;
    /// int_{s1}^{s2} Q_rho(1-t)^2 dt, exact.
    double tail_moment2(double s1, double s2) const;

    bool is_discrete() const;
    const std::variant<LogNormalSdf, DiscreteSdf>& model() const { return model_; }

private:
    explicit SdfModel(std::variant<LogNormalSdf, DiscreteSdf> m);

    std::variant<LogNormalSdf, DiscreteSdf> model_;
    SdfMoments moments_;
};

}  // namespace icxopt
