#include "perch/optimizer.hpp"
#include "perch/scenario_io.hpp"
#include "perch/spline.hpp"

#include <benchmark/benchmark.h>

#include <string>

using namespace perch;

namespace
{
    Scenario load(const char *name)
    {
        return load_scenario(std::string(PERCH_SCENARIO_DIR) + "/" + name + ".yaml");
    }

    void BM_SplineBuild(benchmark::State &state)
    {
        Scenario s = load("benchmark-rest2rest");
        s.solver.pieces = static_cast<int>(state.range(0));
        const DecisionVector d = initial_guess(s);
        for (auto _ : state)
        {
            benchmark::DoNotOptimize(build_trajectory(d, s));
        }
    }
    BENCHMARK(BM_SplineBuild)->Arg(5)->Arg(10)->Arg(20)->Arg(40);

    void BM_CostAndGrad(benchmark::State &state)
    {
        Scenario s = load("moving-vehicle");
        s.solver.pieces = static_cast<int>(state.range(0));
        const Eigen::VectorXd x = initial_guess(s).pack();
        for (auto _ : state)
        {
            benchmark::DoNotOptimize(cost_and_grad(x, s));
        }
    }
    BENCHMARK(BM_CostAndGrad)->Arg(5)->Arg(10)->Arg(20);

    void BM_ColdSolve(benchmark::State &state, const char *name)
    {
        const Scenario s = load(name);
        for (auto _ : state)
        {
            const PlanResult plan = solve(s);
            state.counters["iterations"] = plan.iterations;
        }
        state.SetLabel(name);
    }
    BENCHMARK_CAPTURE(BM_ColdSolve, benchmark, "benchmark-rest2rest")->Unit(benchmark::kMillisecond);
    BENCHMARK_CAPTURE(BM_ColdSolve, moving, "moving-vehicle")->Unit(benchmark::kMillisecond);

    void BM_WarmReplan(benchmark::State &state)
    {
        const Scenario s = load("moving-vehicle");
        const PlanResult first = solve(s);
        const Scenario next = advance(s, first, 0.1);
        for (auto _ : state)
        {
            const PlanResult plan = replan(next, first, 0.1);
            state.counters["iterations"] = plan.iterations;
        }
    }
    BENCHMARK(BM_WarmReplan)->Unit(benchmark::kMillisecond);
} // namespace

BENCHMARK_MAIN();
