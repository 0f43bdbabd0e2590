#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "engram/engram.hpp"

namespace engram::cli {

/// Bad or missing command-line / config input. Maps to exit status 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Output of a subcommand: CSV rows plus a markdown summary that embeds the
/// fully resolved settings.
struct Report {
    std::string csv;
    std::string markdown;
};

/// Parsed `--backend` value: local, mapped or modeled:PRESET.
struct BackendSpec {
    BackendKind kind = BackendKind::LocalMemory;
    std::string preset;

    static BackendSpec parse(std::string_view text);
    std::string label() const;
};

/// Resolved inputs for bench-gather and simulate. Every field is read back
/// from `settings`, so settings.render() is a complete rerun recipe.
struct BenchSpec {
    Settings settings;
    EngramConfig cfg;
    std::vector<BackendSpec> backends;
    std::vector<std::uint32_t> batch_sizes;
    std::uint32_t repetitions = 20;
    std::uint32_t warmup = 3;
    unsigned workers = 8;
    std::uint64_t seed = 1;
    std::uint32_t steps = 16;
    std::optional<std::filesystem::path> table_path;

    /// Throws UsageError on invalid combinations.
    static BenchSpec resolve(Settings settings, std::vector<std::uint32_t> default_batches,
                             std::string default_backends);
};

/// Desk-scale default: Engram-27B geometry truncated to 262,144 rows.
EngramConfig default_bench_config();

/// Seeded synthetic decode batch: `batch` sequences, each with
/// max_ngram_order(cfg) uniform random tokens and the newest position marked.
std::vector<TokenContext> synthetic_batch(const EngramConfig& cfg, std::uint32_t batch, std::uint64_t seed);

void cmd_build_table(const EngramConfig& cfg, const std::filesystem::path& path, Fill fill);

/// Columns: batch,backend,p50_ns,p99_ns,mean_ns,bytes,modeled_ns
Report cmd_bench_gather(const BenchSpec& spec);

/// Columns: batch,backend,layer,deadline_ns,completion_ns,stall_ns,step_ns
Report cmd_simulate(const BenchSpec& spec);

/// Requirements inputs come from settings keys (throughput_tps,
/// s_layer_bytes, n_token, pool_latency_ns, pool_bandwidth, backend) with
/// the serving case study as defaults.
Report cmd_requirements(const Settings& settings);

/// Unit costs come from cost.* keys. Built-in component prices are used
/// only when `allow_defaults` is set.
Report cmd_cost(const Settings& settings, bool allow_defaults);

/// "$12,880" / "-$3,820"; cents shown only when non-zero.
std::string format_dollars(double amount);

/// Entry point shared by the engram-bench binary.
int run(int argc, char** argv);

}  // namespace engram::cli
