#include "icxopt/json_io.hpp"

#include <gtest/gtest.h>

#include <random>

#include "testutil.hpp"

using namespace icxopt;
using namespace icxopt::testutil;
using nlohmann::json;

TEST(JsonIo, QuantileRoundTripIsExact) {
    std::mt19937 rng(12);
    for (int i = 0; i < 100; ++i) {
        const StepQuantile q = random_step_quantile(rng);
        const StepQuantile back = quantile_from_json(quantile_to_json(q));
        EXPECT_EQ(back.breakpoints(), q.breakpoints());
        EXPECT_EQ(back.values(), q.values());
        // serialized text round-trips bit-exactly as well
        const StepQuantile back2 =
            quantile_from_json(json::parse(quantile_to_json(q).dump()));
        EXPECT_EQ(back2.values(), q.values());
    }
}

TEST(JsonIo, RejectsUnknownFields) {
    EXPECT_THROW(quantile_from_json(json::parse(
                     R"({"breakpoints":[0,1],"values":[1],"extra":3})")),
                 std::invalid_argument);
    EXPECT_THROW(sdf_from_json(json::parse(R"({"type":"lognormal","mu":0,"sig":1})")),
                 std::invalid_argument);
    EXPECT_THROW(problem_from_json(json::parse(
                     R"({"sdf":{"type":"lognormal","mu":0,"sigma":1},
                         "benchmark":{"breakpoints":[0,1],"values":[1]},
                         "budget":1,"surprise":true})")),
                 std::invalid_argument);
}

TEST(JsonIo, SdfVariants) {
    const SdfModel ln = sdf_from_json(json::parse(
        R"({"type":"lognormal","mu":-0.1,"sigma":0.34})"));
    EXPECT_NEAR(ln.e_rho(), kERho, 1e-14);

    const SdfModel d = sdf_from_json(json::parse(
        R"({"type":"discrete","quantile":{"breakpoints":[0,0.5,1],"values":[1,2]}})"));
    EXPECT_TRUE(d.is_discrete());
    EXPECT_DOUBLE_EQ(d.e_rho(), 1.5);

    EXPECT_THROW(sdf_from_json(json::parse(R"({"type":"gaussian"})")),
                 std::invalid_argument);
}

TEST(JsonIo, ProblemDefaultsAndModes) {
    const json base = json::parse(
        R"({"sdf":{"type":"lognormal","mu":-0.1,"sigma":0.34},
            "benchmark":{"breakpoints":[0,0.5,1],"values":[1.0,1.2]},
            "budget":1.0})");
    const IcxProblem p = problem_from_json(base);
    EXPECT_EQ(p.grid_size, 4096);
    EXPECT_EQ(p.mode, SolveMode::Exact);

    json g = base;
    g["mode"] = "gridded";
    g["grid_size"] = 256;
    const IcxProblem pg = problem_from_json(g);
    EXPECT_EQ(pg.mode, SolveMode::Gridded);
    EXPECT_EQ(pg.grid_size, 256);

    json bad = base;
    bad["mode"] = "magic";
    EXPECT_THROW(problem_from_json(bad), std::invalid_argument);

    json mv = base;
    mv["target_mean"] = 1.15;
    EXPECT_THROW(problem_from_json(mv), std::invalid_argument);
    EXPECT_NO_THROW(problem_from_json(mv, {"target_mean"}));
}

TEST(JsonIo, SolutionRoundTripKeepsInvariants) {
    const IcxProblem p{example_market(), StepQuantile::two_point(1.0, 1.2, 0.5), 1.0, 512,
                       SolveMode::Exact};
    const IcxSolution sol = solve(p);
    const IcxSolution back = solution_from_json(solution_to_json(sol));
    EXPECT_EQ(back.case_tag, sol.case_tag);
    EXPECT_EQ(back.case_detail, sol.case_detail);
    EXPECT_EQ(back.lambda, sol.lambda);
    EXPECT_EQ(back.variance, sol.variance);
    EXPECT_EQ(back.q_star.values(), sol.q_star.values());
    ASSERT_TRUE(back.pieces.has_value());
    EXPECT_EQ(back.pieces->kappa, sol.pieces->kappa);

    // re-validated invariants after the round trip
    EXPECT_TRUE(icx_dominates(back.q_star, p.benchmark, 1e-6));
    EXPECT_LE(back.budget_used, p.budget + 1e-8);
    EXPECT_GE(back.variance, 0.0);
}

TEST(JsonIo, FrontierSerialization) {
    const IcxProblem p{example_market(), StepQuantile::constant(0.0), 1.0, 256,
                       SolveMode::Exact};
    const double z0 = frontier_z_min(p);
    const auto pts = bpsd_frontier(p, {z0 - 1.0, z0 + 0.2});
    const json j = frontier_to_json(pts);
    ASSERT_EQ(j.size(), 2u);
    EXPECT_TRUE(j[0].contains("error"));
    EXPECT_TRUE(j[1].contains("std_dev"));
}
