#include <benchmark/benchmark.h>

#include "recloss/linear.hpp"
#include "recloss/synthetic.hpp"

using namespace recloss;

static void BM_EaseFit(benchmark::State& state) {
    const int n_items = static_cast<int>(state.range(0));
    auto ds = synthetic_uniform(4 * n_items, n_items, 0.03, 7);
    EaseConfig cfg;
    cfg.lambda = 1.0;
    for (auto _ : state) {
        auto m = ease_fit(ds, cfg);
        benchmark::DoNotOptimize(m.weights.data());
    }
}
BENCHMARK(BM_EaseFit)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

static void BM_IalsSweep(benchmark::State& state) {
    const int n_users = static_cast<int>(state.range(0));
    auto ds = synthetic_uniform(n_users, n_users / 2, 0.02, 7);
    IalsConfig cfg;
    cfg.d = 32;
    cfg.nu = 1.0;
    Eigen::MatrixXd w = Eigen::MatrixXd::Random(n_users, cfg.d) * 0.1;
    Eigen::MatrixXd h = Eigen::MatrixXd::Random(n_users / 2, cfg.d) * 0.1;
    for (auto _ : state) {
        ials_half_step_users(ds, cfg, h, w);
        ials_half_step_items(ds, cfg, w, h);
        benchmark::DoNotOptimize(w.data());
    }
}
BENCHMARK(BM_IalsSweep)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_Theorem2(benchmark::State& state) {
    auto ds = synthetic_uniform(200, static_cast<int>(state.range(0)), 0.05, 3);
    for (auto _ : state) {
        auto report = verify_theorem2(ds, 0.5, 0.3, 10);
        benchmark::DoNotOptimize(report.max_rel_deviation);
    }
}
BENCHMARK(BM_Theorem2)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
