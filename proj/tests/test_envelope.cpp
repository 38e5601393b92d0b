#include "icxopt/envelope.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "icxopt/sdf_model.hpp"
#include "testutil.hpp"

using icxopt::EnvelopeResult;
using icxopt::SampledFunction;
using icxopt::concave_envelope;
using icxopt::convex_envelope;
using icxopt::envelope_slope_at;
using namespace icxopt::testutil;

namespace {

SampledFunction affine(int n, double a, double b) {
    SampledFunction f;
    for (int i = 0; i <= n; ++i) {
        const double s = static_cast<double>(i) / n;
        f.grid.push_back(s);
        f.values.push_back(a + b * s);
    }
    f.grid.front() = 0.0;
    f.grid.back() = 1.0;
    return f;
}

}  // namespace

TEST(Envelope, AffineIsItsOwnEnvelope) {
    const SampledFunction f = affine(16, 0.3, -1.2);
    const EnvelopeResult lo = convex_envelope(f);
    const EnvelopeResult hi = concave_envelope(f);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        EXPECT_NEAR(lo.values[i], f.values[i], 1e-14);
        EXPECT_NEAR(hi.values[i], f.values[i], 1e-14);
    }
    // collinear points collapse to a single maximal segment
    EXPECT_EQ(lo.slopes.size(), 1u);
    EXPECT_NEAR(lo.slopes[0], -1.2, 1e-12);
}

TEST(Envelope, ConcaveFunctionConvexEnvelopeIsChord) {
    SampledFunction f;
    const int n = 64;
    for (int i = 0; i <= n; ++i) {
        const double s = static_cast<double>(i) / n;
        f.grid.push_back(s);
        f.values.push_back(std::sqrt(s));
    }
    f.grid.front() = 0.0;
    f.grid.back() = 1.0;
    const EnvelopeResult e = convex_envelope(f);
    ASSERT_EQ(e.slopes.size(), 1u);
    EXPECT_NEAR(e.slopes[0], 1.0, 1e-12);  // chord from (0,0) to (1,1)
    EXPECT_EQ(e.hull_indices.front(), 0u);
    EXPECT_EQ(e.hull_indices.back(), static_cast<std::size_t>(n));

    const EnvelopeResult c = concave_envelope(f);
    for (std::size_t i = 0; i < f.values.size(); ++i)
        EXPECT_NEAR(c.values[i], f.values[i], 1e-14);  // concave f is its own majorant
}

// Two-point benchmark: N_lambda is concave on [0,p) and [p,1); for lambda
// below (2b-2a)/(A1-A2) the convex envelope has exactly two slopes,
// 2a + lambda A1 and 2b + lambda A2.
TEST(Envelope, TwoPieceSlopesMatchClosedForm) {
    const auto sdf = example_market();
    const double a = 1.0, b = 1.2, p = 0.5;
    const double lam_max = (2 * b - 2 * a) / (kA1 - kA2);
    for (const double lambda : {0.25 * lam_max, 0.6 * lam_max, 0.95 * lam_max}) {
        // exact N_lambda vertices at the benchmark breakpoints
        SampledFunction f;
        f.grid = {0.0, p, 1.0};
        f.values = {0.0, lambda * sdf.tail_moment1(0.0, p) + 2.0 * a * p,
                    lambda * sdf.e_rho() + 2.0 * (a * p + b * (1 - p))};
        const EnvelopeResult e = convex_envelope(f);
        ASSERT_EQ(e.slopes.size(), 2u);
        EXPECT_NEAR(e.slopes[0], 2 * a + lambda * kA1, 1e-10);
        EXPECT_NEAR(e.slopes[1], 2 * b + lambda * kA2, 1e-10);
        EXPECT_NEAR(envelope_slope_at(e, p - 1e-12), 2 * a + lambda * kA1, 1e-10);
        EXPECT_NEAR(envelope_slope_at(e, p), 2 * b + lambda * kA2, 1e-10);
    }
    // above the threshold the envelope is the single chord of slope
    // lambda E[rho] + 2 E[X0]
    const double lambda = 1.1 * lam_max;
    SampledFunction f;
    f.grid = {0.0, p, 1.0};
    f.values = {0.0, lambda * sdf.tail_moment1(0.0, p) + 2.0 * a * p,
                lambda * sdf.e_rho() + 2.0 * (a * p + b * (1 - p))};
    const EnvelopeResult e = convex_envelope(f);
    ASSERT_EQ(e.slopes.size(), 1u);
    EXPECT_NEAR(e.slopes[0], lambda * kERho + 2.0 * 1.1, 1e-10);
}

TEST(Envelope, SlopeAtExamples) {
    const SampledFunction f = affine(8, 1.0, 2.0);
    const EnvelopeResult e = convex_envelope(f);
    EXPECT_NEAR(envelope_slope_at(e, 0.0), 2.0, 1e-12);
    EXPECT_NEAR(envelope_slope_at(e, 0.73), 2.0, 1e-12);
    EXPECT_THROW(envelope_slope_at(e, 1.0), std::invalid_argument);
}

TEST(Envelope, PropertySuite) {
    std::mt19937 rng(2024);
    for (int rep = 0; rep < 300; ++rep) {
        const RandomSampled rs = random_sampled_function(rng);
        SampledFunction f{rs.grid, rs.values};
        const EnvelopeResult lo = convex_envelope(f);
        const EnvelopeResult hi = concave_envelope(f);

        const std::size_t n = f.grid.size() - 1;
        for (std::size_t i = 0; i <= n; ++i) {
            const double tol = 1e-12 * (1.0 + std::abs(f.values[i]));
            EXPECT_LE(lo.values[i], f.values[i] + tol);
            EXPECT_GE(hi.values[i], f.values[i] - tol);
        }
        // endpoint equality, exact
        EXPECT_EQ(lo.values.front(), f.values.front());
        EXPECT_EQ(lo.values.back(), f.values.back());
        EXPECT_EQ(hi.values.front(), f.values.front());
        EXPECT_EQ(hi.values.back(), f.values.back());

        for (std::size_t k = 1; k < lo.slopes.size(); ++k)
            EXPECT_GE(lo.slopes[k], lo.slopes[k - 1] - 1e-12);
        for (std::size_t k = 1; k < hi.slopes.size(); ++k)
            EXPECT_LE(hi.slopes[k], hi.slopes[k - 1] + 1e-12);

        // idempotence
        const EnvelopeResult lo2 = convex_envelope(SampledFunction{f.grid, lo.values});
        for (std::size_t i = 0; i <= n; ++i)
            EXPECT_NEAR(lo2.values[i], lo.values[i], 1e-12 * (1.0 + std::abs(lo.values[i])));
    }
}

// Slopes are constant on every maximal interval where the envelope is strictly
// away from the function (affinity on the gap set).
TEST(Envelope, FlatSlopeOnStrictGaps) {
    std::mt19937 rng(77);
    for (int rep = 0; rep < 200; ++rep) {
        const RandomSampled rs = random_sampled_function(rng);
        SampledFunction f{rs.grid, rs.values};
        const EnvelopeResult lo = convex_envelope(f);
        for (std::size_t i = 0; i + 1 < f.grid.size(); ++i) {
            const bool gap_left = lo.values[i] < f.values[i] - 1e-12;
            if (!gap_left) continue;
            // i is interior to a hull segment: slope to the left and right agree
            const double sl = envelope_slope_at(lo, 0.5 * (f.grid[i - 1] + f.grid[i]));
            const double sr = envelope_slope_at(lo, 0.5 * (f.grid[i] + f.grid[i + 1]));
            EXPECT_NEAR(sl, sr, 1e-12 * (1.0 + std::abs(sl)));
        }
    }
}

// Concave envelope of 2*beta*s - N has slopes 2*beta - (convex envelope of N
// slopes): the reduction used to swap between the two envelope calls.
TEST(Envelope, DualityIdentity) {
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> betas(-2.0, 2.0);
    for (int rep = 0; rep < 200; ++rep) {
        const RandomSampled rs = random_sampled_function(rng);
        const double beta = betas(rng);
        SampledFunction n_fn{rs.grid, rs.values};
        SampledFunction h_fn{rs.grid, rs.values};
        for (std::size_t i = 0; i < h_fn.values.size(); ++i)
            h_fn.values[i] = 2.0 * beta * h_fn.grid[i] - h_fn.values[i];

        const EnvelopeResult n_env = convex_envelope(n_fn);
        const EnvelopeResult h_env = concave_envelope(h_fn);
        ASSERT_EQ(n_env.slopes.size(), h_env.slopes.size());
        for (std::size_t k = 0; k < n_env.slopes.size(); ++k) {
            EXPECT_NEAR(h_env.slopes[k], 2.0 * beta - n_env.slopes[k],
                        1e-10 * (1.0 + std::abs(n_env.slopes[k])));
            EXPECT_EQ(n_env.hull_indices[k], h_env.hull_indices[k]);
        }
    }
}

TEST(Envelope, RejectsBadInput) {
    EXPECT_THROW(convex_envelope(SampledFunction{{0.0}, {1.0}}), std::invalid_argument);
    EXPECT_THROW(convex_envelope(SampledFunction{{0.0, 0.5}, {1.0, 2.0}}),
                 std::invalid_argument);
    EXPECT_THROW(convex_envelope(SampledFunction{{0.0, 0.5, 1.0}, {1.0, 2.0}}),
                 std::invalid_argument);
}
