#include <benchmark/benchmark.h>

#include <random>

#include "recloss/losses.hpp"
#include "recloss/rng.hpp"

using namespace recloss;

namespace {

ScoreBatch make_batch(int n, int m) {
    auto rng = make_rng(1, "bench");
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    ScoreBatch b;
    b.pos = d(rng);
    b.negs.resize(n);
    for (double& x : b.negs) x = d(rng);
    b.extra_pos.resize(m);
    for (double& x : b.extra_pos) x = d(rng);
    b.tau_plus = 0.1;
    return b;
}

void BM_LossKernel(benchmark::State& state, LossFamily family) {
    LossSpec spec = LossSpec::for_family(family);
    if (uses_temperature(family)) spec.temperature = 0.5;
    if (family == LossFamily::ccl || family == LossFamily::debiased_ccl) spec.margin = 0.4;
    ScoreBatch b = make_batch(static_cast<int>(state.range(0)), 10);
    if (family == LossFamily::sampled_softmax) b.proposal_probs.assign(b.negs.size(), 0.1);
    for (auto _ : state) {
        auto out = eval_loss(spec, b);
        benchmark::DoNotOptimize(out.value);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK_CAPTURE(BM_LossKernel, infonce, LossFamily::infonce)->Arg(64)->Arg(800);
BENCHMARK_CAPTURE(BM_LossKernel, debiased_infonce, LossFamily::debiased_infonce)
    ->Arg(64)
    ->Arg(800);
BENCHMARK_CAPTURE(BM_LossKernel, mine_plus, LossFamily::mine_plus)->Arg(64)->Arg(800);
BENCHMARK_CAPTURE(BM_LossKernel, bpr, LossFamily::bpr)->Arg(64)->Arg(800);
BENCHMARK_CAPTURE(BM_LossKernel, ccl, LossFamily::ccl)->Arg(64)->Arg(800);
BENCHMARK_CAPTURE(BM_LossKernel, debiased_ccl, LossFamily::debiased_ccl)->Arg(64)->Arg(800);
BENCHMARK_CAPTURE(BM_LossKernel, mse, LossFamily::mse)->Arg(64)->Arg(800);
BENCHMARK_CAPTURE(BM_LossKernel, sampled_softmax, LossFamily::sampled_softmax)->Arg(64)->Arg(800);

static void BM_GradCheck(benchmark::State& state) {
    LossSpec spec = LossSpec::for_family(LossFamily::debiased_infonce);
    spec.temperature = 0.5;
    ScoreBatch b = make_batch(static_cast<int>(state.range(0)), 10);
    for (auto _ : state) benchmark::DoNotOptimize(grad_check(spec, b, 1e-5));
}
BENCHMARK(BM_GradCheck)->Arg(64);

BENCHMARK_MAIN();
