#include <benchmark/benchmark.h>

#include <vector>

#include "ehsim/analysis.hpp"
#include "ehsim/diagnostics.hpp"
#include "ehsim/simulator.hpp"

using namespace ehsim;

namespace {

SimConfig scheme_b_config(double M, std::uint64_t horizon) {
    SimConfig cfg;
    cfg.M = M;
    cfg.horizon = horizon;
    cfg.replenishment = make_iid_gaussian(10.0, 1.0);
    cfg.policy = make_scheme_b(10.0, 1.0, 2.0, M);
    cfg.rate_fn = make_awgn(1.0);
    cfg.utility = make_log_capacity(cfg.rate_fn);
    return cfg;
}

SimConfig scheme_q_config(double M, double K, std::uint64_t horizon) {
    SimConfig cfg = scheme_b_config(M, horizon);
    cfg.mode = Mode::Joint;
    cfg.K = K;
    cfg.replenishment = make_iid_gaussian(10.0, 4.0);
    cfg.arrivals = make_iid_gaussian(2.5, 1.0);
    cfg.policy = make_scheme_q(10.0, 2.5, 1.0, 2.0, K, cfg.rate_fn);
    return cfg;
}

}  // namespace

static void BM_Step(benchmark::State& state) {
    const auto cfg = scheme_q_config(40.0, 40.0, 1);
    NodeState s = cfg.initial_state();
    double r = 9.0;
    for (auto _ : state) {
        auto [next, rec] = step(s, cfg, r, 3.0);
        benchmark::DoNotOptimize(rec);
        s = next;
        r = r == 9.0 ? 11.0 : 9.0;
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Step);

// Whole runs, including sampling and batch bookkeeping.
static void BM_RunBatteryOnly(benchmark::State& state) {
    ScopedWarningSink quiet(nullptr);
    const auto horizon = static_cast<std::uint64_t>(state.range(0));
    const auto cfg = scheme_b_config(100.0, horizon);
    for (auto _ : state) benchmark::DoNotOptimize(run(cfg));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunBatteryOnly)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

static void BM_RunJoint(benchmark::State& state) {
    ScopedWarningSink quiet(nullptr);
    const auto horizon = static_cast<std::uint64_t>(state.range(0));
    const auto cfg = scheme_q_config(40.0, 40.0, horizon);
    for (auto _ : state) benchmark::DoNotOptimize(run(cfg));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunJoint)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

static void BM_LdRootPoisson(benchmark::State& state) {
    const auto mgf = analytic_log_mgf_fn(make_iid_discrete({0.0, 1.0, 2.0, 5.0}, {0.4, 0.3, 0.2, 0.1}));
    for (auto _ : state) benchmark::DoNotOptimize(ld_root(mgf, 1.1, RootSide::Negative));
}
BENCHMARK(BM_LdRootPoisson);

static void BM_ExactChain(benchmark::State& state) {
    ScopedWarningSink quiet(nullptr);
    SimConfig cfg;
    cfg.M = static_cast<double>(state.range(0));
    cfg.replenishment = make_iid_discrete({0.0, 2.0, 4.0, 8.0}, {0.2, 0.3, 0.3, 0.2});
    cfg.policy = make_constant(3.0);
    cfg.rate_fn = make_awgn(1.0);
    cfg.utility = make_log_capacity(cfg.rate_fn);
    for (auto _ : state) benchmark::DoNotOptimize(exact_chain_analysis(cfg));
}
BENCHMARK(BM_ExactChain)->Arg(20)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
