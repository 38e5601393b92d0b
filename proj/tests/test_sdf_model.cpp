#include "icxopt/sdf_model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "icxopt/normal.hpp"
#include "testutil.hpp"

using icxopt::SdfModel;
using icxopt::StepQuantile;
using icxopt::norm_cdf;
using icxopt::norm_ppf;
using namespace icxopt::testutil;

TEST(Normal, InverseCdfReferenceValues) {
    EXPECT_NEAR(norm_ppf(0.975), 1.959963984540054, 1e-12);
    EXPECT_NEAR(norm_ppf(0.025), -1.959963984540054, 1e-12);
    EXPECT_NEAR(norm_ppf(0.995), 2.575829303548901, 1e-12);
    EXPECT_NEAR(norm_ppf(0.25), -0.674489750196082, 1e-12);
    EXPECT_DOUBLE_EQ(norm_ppf(0.5), 0.0);
    EXPECT_THROW(norm_ppf(0.0), std::invalid_argument);
    EXPECT_THROW(norm_ppf(1.0), std::invalid_argument);
}

TEST(Normal, RoundTrip) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(1e-10, 1.0 - 1e-10);
    for (int i = 0; i < 2000; ++i) {
        const double p = u(rng);
        EXPECT_NEAR(norm_cdf(norm_ppf(p)), p, 1e-12 * std::max(1.0, 1.0 / p));
    }
}

TEST(SdfModel, LogNormalQuantile) {
    const SdfModel m = example_market();
    EXPECT_NEAR(m.quantile(0.5), std::exp(-0.1), 1e-12);  // median = exp(mu)

    const SdfModel std_ln = SdfModel::log_normal(0.0, 1.0);
    EXPECT_NEAR(std_ln.quantile(0.841345), std::exp(1.0), 1e-4);  // Phi(1)

    EXPECT_THROW(m.quantile(1.0), std::invalid_argument);
    EXPECT_NO_THROW(m.quantile(0.0));
}

TEST(SdfModel, LeftLimitConventions) {
    const SdfModel m = example_market();
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.001, 0.999);
    for (int i = 0; i < 100; ++i) {
        const double s = u(rng);
        EXPECT_DOUBLE_EQ(m.quantile_left_limit(s), m.quantile(s));  // continuity
    }

    const SdfModel d = SdfModel::discrete(StepQuantile::two_point(1.0, 2.0, 0.5));
    EXPECT_DOUBLE_EQ(d.quantile_left_limit(0.5), 1.0);
    EXPECT_DOUBLE_EQ(d.quantile(0.5), 2.0);
    EXPECT_DOUBLE_EQ(d.quantile_left_limit(1.0), 2.0);
    EXPECT_DOUBLE_EQ(d.quantile(0.25), 1.0);
}

TEST(SdfModel, RejectsInvalidModels) {
    EXPECT_THROW(SdfModel::log_normal(0.0, 0.0), std::invalid_argument);
    EXPECT_THROW(SdfModel::discrete(StepQuantile::two_point(-1.0, 2.0, 0.5)),
                 std::invalid_argument);  // not positive
    EXPECT_THROW(SdfModel::discrete(StepQuantile::constant(1.0)),
                 std::invalid_argument);  // zero variance
}

TEST(SdfModel, MomentsClosedFormVsFrozenOracle) {
    const SdfModel m = example_market();
    EXPECT_NEAR(m.e_rho(), kERho, 1e-14);
    EXPECT_NEAR(m.e_rho2(), kERho2, 1e-14);
    EXPECT_NEAR(m.var_rho(), kVarRho, 1e-14);
    EXPECT_NEAR(m.var_rho(), m.e_rho2() - m.e_rho() * m.e_rho(), 1e-14);

    const SdfModel d = SdfModel::discrete(StepQuantile::two_point(1.0, 2.0, 0.5));
    EXPECT_DOUBLE_EQ(d.e_rho(), 1.5);
    EXPECT_DOUBLE_EQ(d.e_rho2(), 2.5);
    EXPECT_DOUBLE_EQ(d.var_rho(), 0.25);
}

// Midpoint quadrature of Q_rho converges to E[rho]: the in-test oracle for
// the closed-form moments.
TEST(SdfModel, GridQuadratureConvergesToMoments) {
    const SdfModel m = example_market();
    const int n = 100000;
    double acc = 0.0, acc2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double q = m.quantile((i + 0.5) / n);
        acc += q;
        acc2 += q * q;
    }
    EXPECT_LT(rel_err(acc / n, m.e_rho()), 1e-3);
    EXPECT_LT(rel_err(acc / n, m.e_rho()), 1e-5);  // midpoint is much better than required
    EXPECT_LT(rel_err(acc2 / n, m.e_rho2()), 1e-4);
}

TEST(SdfModel, TailAveragesExampleMarket) {
    const SdfModel m = example_market();
    const auto [a1, a2] = m.tail_averages(0.5);
    // Truncated log-normal closed form, frozen after a 1e7-point quadrature check.
    EXPECT_NEAR(a1, kA1, 1e-12);
    EXPECT_NEAR(a2, kA2, 1e-12);
    EXPECT_GT(a1, a2);
}

TEST(SdfModel, TailAveragesTotalExpectation) {
    const SdfModel m = example_market();
    const SdfModel d = SdfModel::discrete(
        StepQuantile({0.0, 0.2, 0.7, 1.0}, {0.5, 1.0, 3.0}));
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    for (int i = 0; i < 100; ++i) {
        const double p = u(rng);
        for (const SdfModel* s : {&m, &d}) {
            const auto [a1, a2] = s->tail_averages(p);
            EXPECT_NEAR(p * a1 + (1.0 - p) * a2, s->e_rho(), 1e-12);
            EXPECT_GT(a1, a2);
        }
    }
}

TEST(SdfModel, TailMomentsAgainstQuadrature) {
    const SdfModel m = example_market();
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        double s1 = u(rng), s2 = u(rng);
        if (s1 > s2) std::swap(s1, s2);
        const int n = 200000;
        double m1 = 0.0, m2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double t = s1 + (s2 - s1) * (i + 0.5) / n;
            const double q = m.quantile_left_limit(1.0 - t);
            m1 += q;
            m2 += q * q;
        }
        m1 *= (s2 - s1) / n;
        m2 *= (s2 - s1) / n;
        EXPECT_NEAR(m.tail_moment1(s1, s2), m1, 1e-5 * (1.0 + std::abs(m1)));
        EXPECT_NEAR(m.tail_moment2(s1, s2), m2, 1e-4 * (1.0 + std::abs(m2)));
    }

    // discrete: tail moments are exact step sums
    const SdfModel d = SdfModel::discrete(StepQuantile::two_point(1.0, 2.0, 0.25));
    // Q_rho(1-t): 2 on [0, 0.75), 1 on [0.75, 1)
    EXPECT_DOUBLE_EQ(d.tail_moment1(0.0, 1.0), d.e_rho());
    EXPECT_DOUBLE_EQ(d.tail_moment1(0.0, 0.75), 1.5);
    EXPECT_DOUBLE_EQ(d.tail_moment2(0.5, 1.0), 0.25 * 4.0 + 0.25 * 1.0);
    EXPECT_DOUBLE_EQ(d.quantile(0.0), 1.0);
}

TEST(SdfModel, QuantileIsIncreasing) {
    const SdfModel m = example_market();
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(1e-6, 1.0 - 1e-6);
    for (int i = 0; i < 200; ++i) {
        double s1 = u(rng), s2 = u(rng);
        if (s1 > s2) std::swap(s1, s2);
        EXPECT_LE(m.quantile(s1), m.quantile(s2));
    }
}
