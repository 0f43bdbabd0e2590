#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "engram/config.hpp"

namespace engram {

using TokenId = std::uint32_t;

/// Fills n-gram slots that precede the start of a sequence.
inline constexpr TokenId kSentinelToken = std::numeric_limits<TokenId>::max();

/// One sequence plus the positions that need retrieval. During decode this
/// is just the newest position.
struct TokenContext {
    std::vector<TokenId> token_ids;
    std::vector<std::size_t> positions;
};

struct SegmentAddress {
    std::uint64_t row = 0;
    std::uint32_t head = 0;
    std::uint32_t order_idx = 0;
    std::uint64_t byte_offset = 0;
    std::uint32_t length = 0;

    bool operator==(const SegmentAddress&) const = default;
};

/// Reads for one batch step at one layer, grouped position-major, then by
/// order, then by head.
struct GatherPlan {
    std::vector<SegmentAddress> addresses;
    std::size_t token_count = 0;

    std::uint64_t total_bytes() const;
    bool empty() const { return addresses.empty(); }
};

/// Tokens at [position-order+1, position]; slots before index 0 hold
/// kSentinelToken. Throws std::out_of_range for an invalid position.
std::vector<TokenId> extract_ngram(std::span<const TokenId> tokens, std::size_t position,
                                   std::uint32_t order);

/// Deterministic multi-head hash of an n-gram to a row in [0, num_rows).
std::uint64_t hash_to_row(std::span<const TokenId> ngram, std::uint32_t head,
                          std::uint32_t order_idx, const EngramConfig& cfg);

SegmentAddress make_address(std::uint64_t row, std::uint32_t head, std::uint32_t order_idx,
                            const EngramConfig& cfg);

GatherPlan plan_gather(const TokenContext& ctx, const EngramConfig& cfg);

/// Concatenates per-sequence plans in batch order.
GatherPlan plan_gather(std::span<const TokenContext> batch, const EngramConfig& cfg);

}  // namespace engram
