#include "engram/ngram_indexer.hpp"

#include <stdexcept>
#include <string>

namespace engram {
namespace {

constexpr std::uint64_t kHeadMix = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kOrderMix = 0xC2B2AE3D27D4EB4FULL;
constexpr std::uint64_t kTokenMul = 0xFF51AFD7ED558CCDULL;

constexpr std::uint64_t xorshift_multiply(std::uint64_t state) {
    state ^= state >> 29;
    return state * kTokenMul;
}

}  // namespace

std::uint64_t GatherPlan::total_bytes() const {
    std::uint64_t total = 0;
    for (const auto& a : addresses) total += a.length;
    return total;
}

std::vector<TokenId> extract_ngram(std::span<const TokenId> tokens, std::size_t position,
                                   std::uint32_t order) {
    if (position >= tokens.size()) {
        throw std::out_of_range("invalid position " + std::to_string(position) + " for " +
                                std::to_string(tokens.size()) + " tokens");
    }
    std::vector<TokenId> ngram(order, kSentinelToken);
    // slot j holds position - (order - 1 - j)
    for (std::uint32_t j = 0; j < order; ++j) {
        const std::size_t back = order - 1 - j;
        if (back <= position) ngram[j] = tokens[position - back];
    }
    return ngram;
}

std::uint64_t hash_to_row(std::span<const TokenId> ngram, std::uint32_t head,
                          std::uint32_t order_idx, const EngramConfig& cfg) {
    std::uint64_t state = cfg.hash_seed ^ (std::uint64_t{head} * kHeadMix) ^
                          (std::uint64_t{order_idx} * kOrderMix);
    for (TokenId t : ngram) {
        state = (state ^ t) * kTokenMul;
        state ^= state >> 29;
    }
    state = xorshift_multiply(state);
    state = xorshift_multiply(state);
    return state % cfg.num_rows;
}

SegmentAddress make_address(std::uint64_t row, std::uint32_t head, std::uint32_t order_idx,
                            const EngramConfig& cfg) {
    const std::uint64_t seg = segment_bytes(cfg);
    SegmentAddress a;
    a.row = row;
    a.head = head;
    a.order_idx = order_idx;
    a.byte_offset = row * row_bytes(cfg) + head * seg;
    a.length = static_cast<std::uint32_t>(seg);
    return a;
}

GatherPlan plan_gather(const TokenContext& ctx, const EngramConfig& cfg) {
    return plan_gather(std::span<const TokenContext>(&ctx, 1), cfg);
}

GatherPlan plan_gather(std::span<const TokenContext> batch, const EngramConfig& cfg) {
    GatherPlan plan;
    std::size_t positions = 0;
    for (const auto& ctx : batch) positions += ctx.positions.size();
    plan.addresses.reserve(positions * cfg.ngram_orders.size() * cfg.num_heads);

    for (const auto& ctx : batch) {
        for (std::size_t pos : ctx.positions) {
            for (std::uint32_t oi = 0; oi < cfg.ngram_orders.size(); ++oi) {
                const auto ngram = extract_ngram(ctx.token_ids, pos, cfg.ngram_orders[oi]);
                for (std::uint32_t head = 0; head < cfg.num_heads; ++head) {
                    plan.addresses.push_back(make_address(hash_to_row(ngram, head, oi, cfg), head, oi, cfg));
                }
            }
        }
    }
    plan.token_count = positions;
    return plan;
}

}  // namespace engram
