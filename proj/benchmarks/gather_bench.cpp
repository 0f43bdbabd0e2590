#include <benchmark/benchmark.h>

#include <random>

#include "engram/engram.hpp"

namespace {

using namespace engram;

EngramConfig desk_config() {
    auto cfg = engram_27b();
    cfg.num_rows = 262'144;
    return cfg;
}

std::vector<TokenContext> batch_of(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<TokenContext> out(n);
    for (auto& ctx : out) {
        ctx.token_ids = {static_cast<TokenId>(rng() >> 40), static_cast<TokenId>(rng() >> 40),
                         static_cast<TokenId>(rng() >> 40)};
        ctx.positions = {2};
    }
    return out;
}

const BackendPtr& shared_local() {
    static const BackendPtr backend = load_table(desk_config(), Fill::SeededRandom);
    return backend;
}

void BM_LocalGather(benchmark::State& state) {
    const auto cfg = desk_config();
    const auto& backend = shared_local();
    const auto batch = static_cast<std::size_t>(state.range(0));
    const auto workers = static_cast<unsigned>(state.range(1));
    std::vector<GatherPlan> plans;
    for (int i = 0; i < 32; ++i) plans.push_back(plan_gather(batch_of(batch, i), cfg));
    std::vector<std::byte> dest(plans.front().total_bytes());
    std::size_t i = 0;
    for (auto _ : state) {
        read_segments(*backend, plans[i++ % plans.size()], dest, workers);
        benchmark::DoNotOptimize(dest.data());
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * dest.size()));
}
BENCHMARK(BM_LocalGather)
    ->ArgsProduct({{1, 16, 64, 256, 512}, {1, 8}})
    ->ArgNames({"batch", "workers"})
    ->Unit(benchmark::kMicrosecond);

void BM_PrefetchRoundTrip(benchmark::State& state) {
    const auto cfg = desk_config();
    const auto& backend = shared_local();
    const auto plan = plan_gather(batch_of(static_cast<std::size_t>(state.range(0)), 7), cfg);
    for (auto _ : state) {
        auto handle = issue_prefetch(backend, plan, 8);
        benchmark::DoNotOptimize(handle.data().data());
    }
}
BENCHMARK(BM_PrefetchRoundTrip)->Arg(16)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_ModelLatency(benchmark::State& state) {
    const auto model = presets::cxl();
    std::uint64_t msgs = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(model_latency(model, msgs, msgs * 320));
        msgs = msgs % 8'192 + 1;
    }
}
BENCHMARK(BM_ModelLatency);

}  // namespace
