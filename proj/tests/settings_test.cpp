#include <gtest/gtest.h>

#include <sstream>

#include "engram/settings.hpp"

namespace engram {
namespace {

Settings parse(const std::string& text) {
    std::istringstream in(text);
    return Settings::parse(in);
}

TEST(Settings, ParsesKeyValueWithComments) {
    const auto s = parse(
        "# Engram-40B geometry\n"
        "num_rows = 7239680   # vocab\n"
        "\n"
        "ngram_orders=2, 3\n"
        "hash_seed = 0x10\n"
        "fabric.cxl.per_message_ns = 12.5\n");
    EXPECT_EQ(s.get_u64("num_rows"), 7'239'680u);
    EXPECT_EQ(s.get_u64_list("ngram_orders"), (std::vector<std::uint64_t>{2, 3}));
    EXPECT_EQ(s.get_u64("hash_seed"), 16u);
    EXPECT_EQ(s.get_double("fabric.cxl.per_message_ns"), 12.5);
    EXPECT_FALSE(s.get("missing"));
    EXPECT_EQ(parse("backends = local , modeled:cxl,\n").get_list("backends"),
              (std::vector<std::string>{"local", "modeled:cxl"}));
}

TEST(Settings, RejectsMalformedLines) {
    EXPECT_THROW(parse("num_rows 12\n"), ConfigError);
    EXPECT_THROW(parse("= 3\n"), ConfigError);
    EXPECT_THROW(parse("num_rows = twelve\n").get_u64("num_rows"), ConfigError);
}

TEST(Settings, ConfigOverlayAndRender) {
    const auto s = parse("num_rows = 4096\nengram_layers = 3\ntotal_layers = 4\n");
    const auto cfg = config_from(s);
    EXPECT_EQ(cfg.num_rows, 4'096u);
    EXPECT_EQ(cfg.engram_layers, (std::vector<std::uint32_t>{3}));
    EXPECT_EQ(cfg.emb_dim, 1'280u);

    Settings out;
    store_config(out, cfg);
    EXPECT_EQ(config_from(parse(out.render()), EngramConfig{}), cfg);
}

TEST(Settings, InvalidConfigIsReported) {
    EXPECT_THROW(config_from(parse("emb_dim = 1281\n")), ConfigError);
}

TEST(Settings, FabricOverridesRoundTrip) {
    const auto s = parse("fabric.rdma.per_message_ns = 300\nfabric.rdma.max_inflight = 16\n");
    const auto m = fabric_from(s, "rdma");
    EXPECT_EQ(m.per_message_ns, 300.0);
    EXPECT_EQ(m.max_inflight, 16u);
    EXPECT_EQ(m.base_latency_ns, 2'000.0);

    Settings out;
    store_fabric(out, m);
    EXPECT_EQ(fabric_from(parse(out.render()), "rdma"), m);
    EXPECT_THROW(fabric_from(parse("fabric.cxl.max_inflight = 0\n"), "cxl"), std::invalid_argument);
}

TEST(Settings, LayerTimes) {
    const auto cfg = engram_27b();
    const auto uniform = layer_times_from(Settings{}, cfg);
    ASSERT_EQ(uniform.size(), 64u);
    EXPECT_DOUBLE_EQ(uniform[0], 56'250.0);
    const auto step = layer_times_from(parse("step_ns = 6400\n"), cfg);
    EXPECT_DOUBLE_EQ(step[10], 100.0);
    EXPECT_THROW(layer_times_from(parse("layer_exec_ns = 1,2,3\n"), cfg), ConfigError);
}

}  // namespace
}  // namespace engram
