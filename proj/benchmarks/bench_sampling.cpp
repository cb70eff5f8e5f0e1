#include <benchmark/benchmark.h>

#include "recloss/rng.hpp"
#include "recloss/sampling.hpp"
#include "recloss/synthetic.hpp"

using namespace recloss;

static void BM_Negatives(benchmark::State& state, NegativeMode mode) {
    auto ds = synthetic_uniform(2000, 5000, 0.005, 11);
    SamplerConfig cfg;
    cfg.negative_mode = mode;
    cfg.n_negatives = static_cast<int>(state.range(0));
    ItemSampler sampler(cfg, ds);
    auto rng = make_rng(3, "bench-neg");
    std::vector<int> out;
    int u = 0;
    for (auto _ : state) {
        sampler.sample_negatives(u, rng, out);
        benchmark::DoNotOptimize(out.data());
        u = (u + 1) % ds.n_users;
    }
    state.SetItemsProcessed(state.iterations() * cfg.n_negatives);
}

BENCHMARK_CAPTURE(BM_Negatives, uniform_all, NegativeMode::uniform_all)->Arg(800);
BENCHMARK_CAPTURE(BM_Negatives, uniform_unobserved, NegativeMode::uniform_unobserved)->Arg(800);
BENCHMARK_CAPTURE(BM_Negatives, popularity, NegativeMode::popularity)->Arg(800);

static void BM_ExtraPositives(benchmark::State& state) {
    auto ds = synthetic_uniform(2000, 5000, 0.005, 11);
    ItemSampler sampler(SamplerConfig{}, ds);
    auto rng = make_rng(4, "bench-extra");
    int u = 0;
    for (auto _ : state) {
        auto out = sampler.sample_extra_positives(u, 50, rng);
        benchmark::DoNotOptimize(out.data());
        u = (u + 1) % ds.n_users;
    }
}
BENCHMARK(BM_ExtraPositives);

BENCHMARK_MAIN();
