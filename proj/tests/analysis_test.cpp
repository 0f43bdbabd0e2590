#include <gtest/gtest.h>

#include "engram/analysis.hpp"

namespace engram::analysis {
namespace {

TEST(RequiredBandwidth, CaseStudy) {
    auto in = case_study_defaults();
    EXPECT_DOUBLE_EQ(required_bandwidth(in), 716'800'000.0);
    in.n_eng = 0;
    EXPECT_DOUBLE_EQ(required_bandwidth(in), 0.0);
    in.throughput_tps = 1;
    in.s_layer_bytes = 1;
    in.n_eng = 1;
    EXPECT_DOUBLE_EQ(required_bandwidth(in), 1.0);
}

TEST(RequiredBandwidth, LinearInEachFactor) {
    const auto base = case_study_defaults();
    const double b0 = required_bandwidth(base);
    for (double scale : {0.5, 2.0, 3.0, 10.0}) {
        auto t = base;
        t.throughput_tps *= scale;
        EXPECT_DOUBLE_EQ(required_bandwidth(t), b0 * scale);
        auto s = base;
        s.s_layer_bytes *= scale;
        EXPECT_DOUBLE_EQ(required_bandwidth(s), b0 * scale);
    }
    auto n = base;
    n.n_eng = 6;
    EXPECT_DOUBLE_EQ(required_bandwidth(n), b0 * 3);
}

TEST(PrefetchWindow, Examples) {
    auto in = case_study_defaults();
    EXPECT_DOUBLE_EQ(prefetch_window(in), 56'250.0);
    in.engram_layer = 1;
    EXPECT_DOUBLE_EQ(prefetch_window(in), 0.0);
    in.engram_layer = 15;
    EXPECT_DOUBLE_EQ(prefetch_window(in), 787'500.0);
    in.engram_layer = 65;
    EXPECT_THROW(prefetch_window(in), std::out_of_range);
    in.engram_layer = 0;
    EXPECT_THROW(prefetch_window(in), std::out_of_range);
}

TEST(CheckConstraints, Examples) {
    auto in = case_study_defaults();
    in.pool_latency_ns = 20'000;
    auto r = check_constraints(in, 12.5e9);
    EXPECT_TRUE(r.bandwidth_ok);
    EXPECT_TRUE(r.latency_ok);
    EXPECT_DOUBLE_EQ(r.bandwidth_margin, 12.5e9 - 716'800'000.0);

    in.pool_latency_ns = 100'000;
    r = check_constraints(in, 12.5e9);
    EXPECT_FALSE(r.latency_ok);
    EXPECT_DOUBLE_EQ(r.latency_margin_ns, -43'750.0);

    r = check_constraints(in, 716'800'000.0);
    EXPECT_FALSE(r.bandwidth_ok);
    in.pool_latency_ns = 56'250.0;
    EXPECT_FALSE(check_constraints(in, 1e12).latency_ok);
}

TEST(Validate, RejectsBadInputs) {
    auto in = case_study_defaults();
    EXPECT_NO_THROW(validate(in));
    in.throughput_tps = 0;
    EXPECT_THROW(validate(in), std::invalid_argument);
    auto c = component_cost_defaults();
    c.nodes = 0;
    EXPECT_THROW(validate(c), std::invalid_argument);
}

struct CostRow {
    double params_b;
    std::uint32_t nodes;
    double local, pool, savings;
};

// Storage cost comparison as published for 100B/400B Engram tables.
constexpr CostRow kPublished[] = {
    {100, 2, 6'000, 9'820, -3'820},      {100, 4, 12'000, 10'840, 1'160},
    {100, 8, 24'000, 12'880, 11'120},    {100, 16, 48'000, 16'960, 31'040},
    {400, 2, 24'000, 18'820, 5'180},     {400, 4, 48'000, 19'840, 28'160},
    {400, 8, 96'000, 21'880, 74'120},    {400, 16, 192'000, 25'960, 166'040},
};

TEST(Cost, ReproducesPublishedRows) {
    for (const auto& row : kPublished) {
        auto c = component_cost_defaults();
        c.nodes = row.nodes;
        c.table_gb = table_gb_for_params(row.params_b);
        EXPECT_DOUBLE_EQ(local_cost(c), row.local) << row.params_b << "B x" << row.nodes;
        EXPECT_DOUBLE_EQ(pool_cost(c), row.pool) << row.params_b << "B x" << row.nodes;
        EXPECT_DOUBLE_EQ(savings(c), row.savings) << row.params_b << "B x" << row.nodes;
    }
}

TEST(Cost, EdgeCases) {
    auto c = component_cost_defaults();
    c.table_gb = 0;
    c.nodes = 3;
    EXPECT_DOUBLE_EQ(local_cost(c), 0.0);
    CostInput even{10, 0, 0, 0, 1, 7};
    EXPECT_DOUBLE_EQ(savings(even), 0.0);
}

TEST(Cost, SavingsIncreaseWithNodesPastBreakEven) {
    auto c = component_cost_defaults();
    for (double gb : {200.0, 800.0, 35.0}) {
        c.table_gb = gb;
        ASSERT_GT(c.dram_per_gb * gb, c.adapter_cost + c.controller_cost);
        double prev = -1e300;
        for (std::uint32_t n = 1; n <= 64; ++n) {
            c.nodes = n;
            ASSERT_GT(savings(c), prev);
            prev = savings(c);
        }
    }
}

}  // namespace
}  // namespace engram::analysis
