#include <benchmark/benchmark.h>

#include <random>

#include "engram/engram.hpp"

namespace {

using namespace engram;

void BM_HashToRow(benchmark::State& state) {
    const auto cfg = engram_27b();
    std::mt19937_64 rng(1);
    std::vector<TokenId> ngram(static_cast<std::size_t>(state.range(0)));
    for (auto& t : ngram) t = static_cast<TokenId>(rng() >> 40);
    std::uint32_t head = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(hash_to_row(ngram, head, 0, cfg));
        head = (head + 1) & 7;
        ngram[0] += 1;
    }
}
BENCHMARK(BM_HashToRow)->Arg(2)->Arg(3);

void BM_PlanGather(benchmark::State& state) {
    const auto cfg = engram_27b();
    std::mt19937_64 rng(2);
    std::vector<TokenContext> batch(static_cast<std::size_t>(state.range(0)));
    for (auto& ctx : batch) {
        ctx.token_ids = {static_cast<TokenId>(rng() >> 40), static_cast<TokenId>(rng() >> 40),
                         static_cast<TokenId>(rng() >> 40)};
        ctx.positions = {2};
    }
    for (auto _ : state) {
        auto plan = plan_gather(batch, cfg);
        benchmark::DoNotOptimize(plan.addresses.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * batch.size()));
}
BENCHMARK(BM_PlanGather)->Arg(1)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

}  // namespace
