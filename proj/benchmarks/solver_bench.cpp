#include <benchmark/benchmark.h>

#include <cmath>

#include "torusflow/cycle_basis.hpp"
#include "torusflow/flows.hpp"
#include "torusflow/powerflow.hpp"

using namespace torusflow;

namespace {

WeightedGraph grid(int side) {
    std::vector<Edge> edges;
    for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c) {
            const int v = r * side + c;
            if (c + 1 < side) edges.push_back({v, v + 1, 1.0});
            if (r + 1 < side) edges.push_back({v, v + side, 1.0});
        }
    return {side * side, edges};
}

void solve_all_expo(benchmark::State& state) {
    const auto problem = case_to_problem(builtin_case("expo(" + std::to_string(state.range(0)) + ")"), 1.4);
    for (auto _ : state) benchmark::DoNotOptimize(solve_all(problem));
    state.counters["windings"] = std::pow(3.0, static_cast<double>(state.range(0)));
}
BENCHMARK(solve_all_expo)->DenseRange(1, 6)->Unit(benchmark::kMillisecond);

void iterate_ring12(benchmark::State& state) {
    const auto problem = case_to_problem(builtin_case("ring12-asym"), kPi / 2.0 - 0.01);
    const WindingSolver solver(problem, fundamental_cycle_basis(problem.graph()));
    for (auto _ : state) benchmark::DoNotOptimize(solver.iterate({1}));
}
BENCHMARK(iterate_ring12)->Unit(benchmark::kMicrosecond);

void minimum_basis_grid(benchmark::State& state) {
    const auto g = grid(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(minimum_cycle_basis(g));
}
BENCHMARK(minimum_basis_grid)->RangeMultiplier(2)->Range(4, 16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
