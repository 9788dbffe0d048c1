#include <benchmark/benchmark.h>

#include <vector>

#include "parapos/duhamel.hpp"
#include "parapos/fdm.hpp"
#include "parapos/functions.hpp"
#include "parapos/hypothesis.hpp"
#include "parapos/profiles.hpp"

using namespace parapos;

namespace {

LVCoefficients competition() {
    return LVCoefficients::two_species(0.01, 0.02, make_constant(1.0), make_constant(1.0), make_constant(0.5),
                                       make_constant(0.8), make_constant(0.4), make_constant(1.0));
}

ProblemSpec problem(int dims, int nodes) {
    std::vector<Interval> bounds(static_cast<std::size_t>(dims), Interval{0.0, 1.0});
    const SpatialDomain dom(bounds);
    const Grid g(dom, std::vector<int>(static_cast<std::size_t>(dims), nodes));
    const auto phi = profiles::stack({profiles::bump(0.8, {0.4, 0.5}, 0.3), profiles::bump(0.6, {0.6, 0.5}, 0.3)});
    return build_lv_problem(competition(), dom, discretize(g, 2, phi), 1.0);
}

void BM_Step1D(benchmark::State& state) {
    const auto spec = problem(1, static_cast<int>(state.range(0)));
    SchemeConfig s;
    s.dt = 1e-3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(step(spec.initial, 0.0, s.dt, spec, s));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Step1D)->Arg(101)->Arg(401)->Arg(1601);

void BM_Step2D(benchmark::State& state) {
    const auto spec = problem(2, static_cast<int>(state.range(0)));
    SchemeConfig s;
    s.dt = 1e-3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(step(spec.initial, 0.0, s.dt, spec, s));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_Step2D)->Arg(41)->Arg(101);

void BM_HeatEvolve(benchmark::State& state) {
    const auto spec = problem(1, static_cast<int>(state.range(0)));
    KernelConfig k;
    k.diffusion = {0.01, 0.02};
    for (auto _ : state) {
        benchmark::DoNotOptimize(heat_evolve(spec.initial, 0.05, k));
    }
}
BENCHMARK(BM_HeatEvolve)->Arg(201)->Arg(801);

void BM_CheckHypotheses(benchmark::State& state) {
    const auto spec = problem(1, 101);
    SampleBudget b;
    b.u_points = static_cast<int>(state.range(0));
    b.u_radius = 2.0;
    CheckSelection all;
    all.dissipativity_full = true;
    for (auto _ : state) {
        benchmark::DoNotOptimize(check_hypotheses(spec, b, all));
    }
}
BENCHMARK(BM_CheckHypotheses)->Arg(32)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
