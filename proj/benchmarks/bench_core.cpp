#include <benchmark/benchmark.h>

#include "bimodal/lindblad.hpp"
#include "bimodal/micro_bath.hpp"
#include "bimodal/propagator.hpp"
#include "bimodal/states.hpp"

using namespace bimodal;

static void BM_MixingCoefficients(benchmark::State& state) {
    const DriftConstants dc = drift_constants(fig1_config(1.0));
    double t = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(mixing_coefficients(dc, t));
        t += 1e-6;
    }
}
BENCHMARK(BM_MixingCoefficients);

static void BM_FidelityScs(benchmark::State& state) {
    const MixingMatrix m = mixing_coefficients(drift_constants(fig1_config(1.0)), 1e-3);
    for (auto _ : state) benchmark::DoNotOptimize(fidelity_scs(m, 2.0));
}
BENCHMARK(BM_FidelityScs);

static void BM_HusimiGrid(benchmark::State& state) {
    const BranchedDensity bd = evolve_branched(mixing_coefficients(drift_constants(fig1_config(1.0)), 1e-3),
                                               make_cat_state(2.0));
    GridSpec grid;
    grid.points = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(husimi_q(bd, grid));
}
BENCHMARK(BM_HusimiGrid)->Arg(81);

static void BM_MicroBathSetup(benchmark::State& state) {
    const PhysicalConfig cfg = fig1_config(1.0);
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        MicroBath micro(cfg, build_bath(cfg, n, two_pi * 1e5));
        benchmark::DoNotOptimize(micro.dimension());
    }
}
BENCHMARK(BM_MicroBathSetup)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

static void BM_MicroFidelity(benchmark::State& state) {
    const PhysicalConfig cfg = fig1_config(1.0);
    const MicroBath micro(cfg, build_bath(cfg, 800, two_pi * 1e5));
    for (auto _ : state) benchmark::DoNotOptimize(micro.micro_fidelity(2.0, 1e-3));
}
BENCHMARK(BM_MicroFidelity)->Unit(benchmark::kMicrosecond);

static void BM_LindbladApply(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const LindbladGenerator gen = build_generator(fig1_config(1.0), d, d);
    const FockDensity rho = pure_density(branched_state_fock(make_cat_state(1.0), gen.space()), gen.space());
    Eigen::MatrixXcd out(gen.dimension(), gen.dimension());
    for (auto _ : state) {
        gen.apply(rho.rho, out);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_LindbladApply)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
