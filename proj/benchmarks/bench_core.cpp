#include <benchmark/benchmark.h>

#include <random>

#include "icxopt/beating.hpp"
#include "icxopt/envelope.hpp"
#include "icxopt/oracle.hpp"
#include "icxopt/solver.hpp"

using namespace icxopt;

namespace {

SdfModel market() { return SdfModel::log_normal(-0.1, 0.34); }

SampledFunction random_function(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    SampledFunction f;
    f.grid.resize(n + 1);
    f.values.resize(n + 1);
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        f.grid[i] = static_cast<double>(i) / n;
        acc += g(rng);
        f.values[i] = acc;
    }
    f.grid[0] = 0.0;
    f.grid[n] = 1.0;
    return f;
}

}  // namespace

static void BM_ConvexEnvelope(benchmark::State& state) {
    const SampledFunction f = random_function(static_cast<int>(state.range(0)), 42);
    for (auto _ : state) {
        auto env = convex_envelope(f);
        benchmark::DoNotOptimize(env.slopes.data());
    }
}
BENCHMARK(BM_ConvexEnvelope)->Arg(4096)->Arg(65536)->Unit(benchmark::kMicrosecond);

static void BM_TwoPointClosedForm(benchmark::State& state) {
    const IcxProblem p{market(), StepQuantile::two_point(0.95, 1.25, 0.5), 1.0, 4096,
                       SolveMode::Exact};
    for (auto _ : state) {
        auto sol = two_point_closed_form(p);
        benchmark::DoNotOptimize(sol.variance);
    }
}
BENCHMARK(BM_TwoPointClosedForm)->Unit(benchmark::kMillisecond);

static void BM_SolveGeneralGridded(benchmark::State& state) {
    const IcxProblem p{market(),
                       StepQuantile::from_atoms({0.9, 1.1, 1.3}, {1. / 3, 1. / 3, 1. / 3}),
                       1.0, static_cast<int>(state.range(0)), SolveMode::Gridded};
    for (auto _ : state) {
        auto sol = solve_general(p);
        benchmark::DoNotOptimize(sol.variance);
    }
}
BENCHMARK(BM_SolveGeneralGridded)->Arg(4096)->Arg(20000)->Unit(benchmark::kMillisecond);

static void BM_FrontierPoint(benchmark::State& state) {
    const IcxProblem p{market(), StepQuantile::two_point(-0.2, 0.2, 0.5), 1.0, 4096,
                       SolveMode::Exact};
    const double z = frontier_z_min(p) + 0.5;
    for (auto _ : state) {
        auto pts = bpsd_frontier(p, {z});
        benchmark::DoNotOptimize(pts.front().std_dev);
    }
}
BENCHMARK(BM_FrontierPoint)->Unit(benchmark::kMillisecond);

static void BM_Psi(benchmark::State& state) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int n = static_cast<int>(state.range(0));
    std::vector<double> cells(n);
    double acc = 0.0;
    for (double& v : cells) {
        acc += u(rng) / n;
        v = acc;
    }
    const StepQuantile q = StepQuantile::from_uniform_cells(cells);
    const StepQuantile q0 = StepQuantile::two_point(0.1, 0.4, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(psi(q, q0));
}
BENCHMARK(BM_Psi)->Arg(4096)->Unit(benchmark::kMicrosecond);

static void BM_OracleSolve(benchmark::State& state) {
    const IcxProblem p{market(), StepQuantile::two_point(0.95, 1.25, 0.5), 1.0, 512,
                       SolveMode::Exact};
    for (auto _ : state) {
        auto r = oracle_solve(p, static_cast<int>(state.range(0)));
        benchmark::DoNotOptimize(r.variance);
    }
}
BENCHMARK(BM_OracleSolve)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
