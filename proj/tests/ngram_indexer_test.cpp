#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "engram/ngram_indexer.hpp"
#include "test_support.hpp"

namespace engram {
namespace {

constexpr TokenId S = kSentinelToken;

// Written directly from the documented mixing recipe, independent of the
// library code path.
std::uint64_t reference_row(const std::vector<TokenId>& ngram, std::uint32_t head, std::uint32_t order_idx,
                            std::uint64_t seed, std::uint64_t rows) {
    const std::uint64_t c1 = 0x9E3779B97F4A7C15ULL, c2 = 0xC2B2AE3D27D4EB4FULL, c3 = 0xFF51AFD7ED558CCDULL;
    std::uint64_t s = seed ^ (head * c1) ^ (order_idx * c2);
    for (std::uint64_t t : ngram) {
        s = (s ^ t) * c3;
        s = s ^ (s >> 29);
    }
    for (int round = 0; round < 2; ++round) {
        s = s ^ (s >> 29);
        s = s * c3;
    }
    return s % rows;
}

TEST(ExtractNgram, Window) {
    const std::vector<TokenId> tokens{7, 8, 9};
    EXPECT_EQ(extract_ngram(tokens, 2, 2), (std::vector<TokenId>{8, 9}));
    EXPECT_EQ(extract_ngram(tokens, 0, 3), (std::vector<TokenId>{S, S, 7}));
    EXPECT_EQ(extract_ngram(std::vector<TokenId>{5}, 0, 2), (std::vector<TokenId>{S, 5}));
    EXPECT_EQ(S, 0xFFFFFFFFu);
}

TEST(ExtractNgram, InvalidPosition) {
    const std::vector<TokenId> tokens{7, 8, 9};
    EXPECT_THROW(extract_ngram(tokens, 3, 2), std::out_of_range);
    EXPECT_THROW(extract_ngram({}, 0, 1), std::out_of_range);
}

TEST(HashToRow, Deterministic) {
    const auto cfg = engram_27b();
    const std::vector<TokenId> ngram{8, 9};
    EXPECT_EQ(hash_to_row(ngram, 0, 0, cfg), hash_to_row(ngram, 0, 0, cfg));
}

TEST(HashToRow, FrozenVectors) {
    // computed with an independent Python evaluation of the mixing recipe
    auto cfg = engram_27b();
    EXPECT_EQ(hash_to_row(std::vector<TokenId>{8, 9}, 0, 0, cfg), 1'021'553u);
    EXPECT_EQ(hash_to_row(std::vector<TokenId>{8, 9}, 1, 0, cfg), 1'742'880u);
    EXPECT_EQ(hash_to_row(std::vector<TokenId>{7, 8, 9}, 0, 1, cfg), 1'492'541u);
    EXPECT_EQ(hash_to_row(std::vector<TokenId>{S, 5}, 3, 0, cfg), 1'723'714u);
    EXPECT_EQ(hash_to_row(std::vector<TokenId>{1, 2}, 7, 1, cfg), 562'272u);
    cfg.hash_seed = 0;
    cfg.num_rows = 4'096;
    EXPECT_EQ(hash_to_row(std::vector<TokenId>{8, 9}, 0, 0, cfg), 1'019u);
    EXPECT_EQ(hash_to_row(std::vector<TokenId>{1, 2}, 7, 1, cfg), 3'490u);
}

TEST(HashToRow, MatchesReferenceOnRandomInputs) {
    std::mt19937_64 rng(11);
    auto cfg = engram_27b();
    for (int i = 0; i < 5'000; ++i) {
        std::vector<TokenId> ngram(1 + rng() % 4);
        for (auto& t : ngram) t = static_cast<TokenId>(rng());
        const auto head = static_cast<std::uint32_t>(rng() % 8);
        const auto oi = static_cast<std::uint32_t>(rng() % 3);
        cfg.hash_seed = rng();
        cfg.num_rows = 1 + rng() % 10'000'000;
        ASSERT_EQ(hash_to_row(ngram, head, oi, cfg), reference_row(ngram, head, oi, cfg.hash_seed, cfg.num_rows));
    }
}

TEST(HashToRow, HeadsSelectDifferentRows) {
    const auto cfg = engram_27b();
    std::mt19937_64 rng(3);
    int same = 0;
    constexpr int kCorpus = 10'000;
    for (int i = 0; i < kCorpus; ++i) {
        const std::vector<TokenId> ngram{static_cast<TokenId>(rng() >> 40), static_cast<TokenId>(rng() >> 40)};
        if (hash_to_row(ngram, 0, 0, cfg) == hash_to_row(ngram, 1, 0, cfg)) ++same;
    }
    // collision probability per pair is 1 / 2,262,400
    EXPECT_LE(same, 2);
    EXPECT_NE(hash_to_row(std::vector<TokenId>{8, 9}, 0, 0, cfg), hash_to_row(std::vector<TokenId>{8, 9}, 1, 0, cfg));
}

TEST(HashToRow, ChiSquarePerHeadWithinBand) {
    auto cfg = engram_27b();
    cfg.num_rows = 4'096;
    constexpr int kSamples = 1'000'000;
    for (std::uint32_t head = 0; head < 8; ++head) {
        std::mt19937_64 rng(1'000 + head);
        std::vector<std::uint64_t> hist(cfg.num_rows, 0);
        std::vector<TokenId> ngram(2);
        for (int i = 0; i < kSamples; ++i) {
            ngram[0] = static_cast<TokenId>(rng());
            ngram[1] = static_cast<TokenId>(rng());
            ++hist[hash_to_row(ngram, head, 0, cfg)];
        }
        const double expected = static_cast<double>(kSamples) / cfg.num_rows;
        double chi2 = 0.0;
        for (auto n : hist) chi2 += (n - expected) * (n - expected) / expected;
        EXPECT_GE(chi2, 3'840.0) << "head " << head;
        EXPECT_LE(chi2, 4'360.0) << "head " << head;
    }
}

TEST(PlanGather, DecodeBatch256) {
    const auto cfg = engram_27b();
    std::mt19937_64 rng(5);
    const auto batch = testing::random_batch(rng, 256, 3);
    const auto plan = plan_gather(batch, cfg);
    EXPECT_EQ(plan.token_count, 256u);
    EXPECT_EQ(plan.addresses.size(), 4'096u);
    EXPECT_EQ(plan.total_bytes(), 1'310'720u);
}

TEST(PlanGather, SingleAddress) {
    auto cfg = testing::small_config();
    cfg.ngram_orders = {2};
    cfg.num_heads = 1;
    TokenContext ctx{{4, 5}, {1}};
    const auto plan = plan_gather(ctx, cfg);
    ASSERT_EQ(plan.addresses.size(), 1u);
    const auto& a = plan.addresses[0];
    EXPECT_EQ(a.row, hash_to_row(std::vector<TokenId>{4, 5}, 0, 0, cfg));
    EXPECT_EQ(a.byte_offset, a.row * row_bytes(cfg));
    EXPECT_EQ(a.length, segment_bytes(cfg));
}

TEST(PlanGather, DeterministicAndOrdered) {
    const auto cfg = testing::small_config();
    TokenContext ctx{{1, 2, 3, 4, 5}, {4, 2}};
    const auto a = plan_gather(ctx, cfg);
    const auto b = plan_gather(ctx, cfg);
    EXPECT_EQ(a.addresses, b.addresses);
    // position-major, then order, then head
    std::size_t i = 0;
    for (std::size_t p = 0; p < 2; ++p) {
        for (std::uint32_t oi = 0; oi < cfg.ngram_orders.size(); ++oi) {
            for (std::uint32_t h = 0; h < cfg.num_heads; ++h, ++i) {
                EXPECT_EQ(a.addresses[i].order_idx, oi);
                EXPECT_EQ(a.addresses[i].head, h);
            }
        }
    }
}

TEST(PlanGather, PropagatesInvalidPosition) {
    TokenContext ctx{{1, 2}, {2}};
    EXPECT_THROW(plan_gather(ctx, testing::small_config()), std::out_of_range);
}

TEST(PlanGather, SizeLawAndBoundsProperty) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        EngramConfig cfg = testing::small_config(1 + rng() % 5'000);
        cfg.num_heads = 1u << (rng() % 4);
        cfg.emb_dim = cfg.num_heads * (1 + rng() % 16);
        cfg.ngram_orders.assign(rng() % 4, 0);
        for (auto& o : cfg.ngram_orders) o = 1 + rng() % 4;
        cfg.elem_bytes = rng() % 2 ? 2 : 4;
        cfg.hash_seed = rng();
        const auto batch = testing::random_batch(rng, 1 + rng() % 20, 1 + rng() % 6);
        const auto plan = plan_gather(batch, cfg);
        ASSERT_EQ(plan.addresses.size(), plan.token_count * cfg.ngram_orders.size() * cfg.num_heads);
        for (const auto& a : plan.addresses) {
            ASSERT_LT(a.row, cfg.num_rows);
            ASSERT_EQ(a.byte_offset, a.row * row_bytes(cfg) + a.head * segment_bytes(cfg));
            ASSERT_LE(a.byte_offset + a.length, table_bytes(cfg));
        }
    }
}

TEST(PlanGather, PermutationStability) {
    const auto cfg = testing::small_config();
    std::mt19937_64 rng(23);
    TokenContext ctx;
    ctx.token_ids.resize(40);
    for (auto& t : ctx.token_ids) t = static_cast<TokenId>(rng());
    for (std::size_t p = 0; p < 40; ++p) ctx.positions.push_back(p);
    const auto base = plan_gather(ctx, cfg);

    auto shuffled = ctx;
    std::shuffle(shuffled.positions.begin(), shuffled.positions.end(), rng);
    const auto plan = plan_gather(shuffled, cfg);
    const std::size_t group = cfg.ngram_orders.size() * cfg.num_heads;
    for (std::size_t i = 0; i < shuffled.positions.size(); ++i) {
        const std::size_t p = shuffled.positions[i];
        for (std::size_t j = 0; j < group; ++j) {
            ASSERT_EQ(plan.addresses[i * group + j], base.addresses[p * group + j]);
        }
    }
}

}  // namespace
}  // namespace engram
