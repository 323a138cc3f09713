#include <benchmark/benchmark.h>

#include "boomerang/datasets.hpp"
#include "boomerang/denoiser.hpp"
#include "boomerang/forward.hpp"
#include "boomerang/metrics.hpp"
#include "boomerang/rng.hpp"
#include "boomerang/sampler.hpp"

using namespace bmk;

static void BM_build_linear(benchmark::State& state) {
    const int T = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_linear(T, 1e-4, 0.02));
    }
}
BENCHMARK(BM_build_linear)->Arg(1000)->Arg(10000);

static void BM_forward_jump(benchmark::State& state) {
    const NoiseSchedule s = build_linear(1000, 1e-4, 0.02);
    RngStream rng(1);
    const Sample x0{std::vector<double>(state.range(0), 0.5), 0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(forward_jump(x0, 500, s, rng));
    }
}
BENCHMARK(BM_forward_jump)->Arg(2)->Arg(256);

static void BM_reverse_step_oracle(benchmark::State& state) {
    const NoiseSchedule s = build_linear(1000, 1e-4, 0.02);
    const GaussianMixture g = gmm2_mixture();
    const OracleDenoiser den(g, s);
    RngStream rng(2);
    const Sample x{{0.4, -0.7}, 500};
    for (auto _ : state) {
        benchmark::DoNotOptimize(reverse_step(x, den, s, rng));
    }
}
BENCHMARK(BM_reverse_step_oracle);

static void BM_reverse_step_oracle_bumps(benchmark::State& state) {
    const NoiseSchedule s = build_linear(1000, 1e-4, 0.02);
    const GaussianMixture g = bumps16_mixture();
    const OracleDenoiser den(g, s);
    RngStream rng(3);
    Sample x{g.means[0], 500};
    for (auto _ : state) {
        benchmark::DoNotOptimize(reverse_step(x, den, s, rng));
    }
}
BENCHMARK(BM_reverse_step_oracle_bumps);

static void BM_boomerang_vs_global(benchmark::State& state) {
    // argument: t_boom as a percentage of T
    const NoiseSchedule s = build_linear(1000, 1e-4, 0.02);
    const GaussianMixture g = gauss1_mixture(2);
    const OracleDenoiser den(g, s);
    BoomerangConfig cfg;
    cfg.t_boom = static_cast<int>(state.range(0) * 10);
    cfg.seed = 7;
    const Sample x0{{0.1, 0.2}, 0};
    std::uint64_t chain = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(boomerang(x0, cfg, den, s, chain++));
    }
}
BENCHMARK(BM_boomerang_vs_global)->Arg(10)->Arg(50)->Arg(100);

static void BM_mmd_two_sample(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const GaussianMixture g = gauss1_mixture(2);
    const auto a = sample_mixture(g, n, 1);
    const auto b = sample_mixture(g, n, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(two_sample(a, b, 1.0));
    }
}
BENCHMARK(BM_mmd_two_sample)->Arg(200)->Arg(1000);

BENCHMARK_MAIN();
