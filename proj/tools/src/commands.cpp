#include "engram_cli/commands.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

namespace engram::cli {
namespace {

constexpr std::string_view kGatherSchema = "#schema=engram.bench_gather.v1";
constexpr std::string_view kSimulateSchema = "#schema=engram.simulate.v1";
constexpr std::string_view kRequirementsSchema = "#schema=engram.requirements.v1";
constexpr std::string_view kCostSchema = "#schema=engram.cost.v1";

std::string group_thousands(std::string digits) {
    std::string out;
    const std::size_t n = digits.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0 && (n - i) % 3 == 0) out += ',';
        out += digits[i];
    }
    return out;
}

std::string grouped(double value) {
    const bool neg = value < 0;
    const double mag = std::fabs(value);
    const double whole = std::floor(mag);
    std::string text = group_thousands(fmt::format("{:.0f}", whole));
    const double frac = mag - whole;
    if (frac > 1e-9) {
        auto f = fmt::format("{:.2f}", frac);  // "0.xx"
        text += f.substr(1);
    }
    return neg ? "-" + text : text;
}

std::string ns(double v) { return fmt::format("{:.1f}", v); }

std::string settings_block(const Settings& s) {
    return "## Resolved configuration\n\n```ini\n" + s.render() + "```\n";
}

std::vector<std::uint32_t> u32_list(const Settings& s, std::string_view key, std::vector<std::uint32_t> fallback) {
    auto v = s.get_u64_list(key);
    if (!v) return fallback;
    std::vector<std::uint32_t> out;
    for (auto x : *v) {
        if (x > 0xFFFFFFFFULL) throw UsageError(fmt::format("{}: value out of range", key));
        out.push_back(static_cast<std::uint32_t>(x));
    }
    return out;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = seed ^ (a * 0x9E3779B97F4A7C15ULL) ^ (b * 0xC2B2AE3D27D4EB4FULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

TokenId draw_token(std::mt19937_64& rng) {
    while (true) {
        const auto t = static_cast<TokenId>(rng() >> 32);
        if (t != kSentinelToken) return t;
    }
}

/// Builds every requested backend, sharing one in-memory table.
class BackendSet {
public:
    explicit BackendSet(const BenchSpec& spec) : spec_(spec) {}

    BackendPtr get(const BackendSpec& b) {
        switch (b.kind) {
            case BackendKind::LocalMemory: return local();
            case BackendKind::MappedFile:
                if (!spec_.table_path) throw UsageError("mapped backend requires --table (or table_path)");
                if (!mapped_) mapped_ = load_table(*spec_.table_path, spec_.cfg, BackendKind::MappedFile);
                return mapped_;
            case BackendKind::Modeled:
                return std::make_shared<ModeledBackend>(local(), fabric_from(spec_.settings, b.preset));
        }
        throw UsageError("unknown backend");
    }

private:
    BackendPtr local() {
        if (!local_) {
            local_ = spec_.table_path ? load_table(*spec_.table_path, spec_.cfg, BackendKind::LocalMemory)
                                      : load_table(spec_.cfg, Fill::SeededRandom);
        }
        return local_;
    }

    const BenchSpec& spec_;
    BackendPtr local_;
    BackendPtr mapped_;
};

double nearest_rank(std::vector<double> sorted, double q) {
    std::sort(sorted.begin(), sorted.end());
    const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
    return sorted[std::max<std::size_t>(rank, 1) - 1];
}

/// Wall time of one gather; sub-microsecond gathers are repeated and averaged.
double timed_gather(const StorageBackend& backend, const GatherPlan& plan, std::span<std::byte> dest,
                    unsigned workers, GatherReport& report) {
    report = read_segments(backend, plan, dest, workers);
    if (report.wall_ns >= 1'000.0 || plan.empty()) return report.wall_ns;
    const int inner = static_cast<int>(std::ceil(10'000.0 / std::max(report.wall_ns, 1.0)));
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < inner; ++i) read_segments(backend, plan, dest, workers);
    const auto stop = std::chrono::steady_clock::now();
    return static_cast<double>(std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count()) / inner;
}

}  // namespace

BackendSpec BackendSpec::parse(std::string_view text) {
    BackendSpec b;
    if (text == "local") {
        b.kind = BackendKind::LocalMemory;
    } else if (text == "mapped") {
        b.kind = BackendKind::MappedFile;
    } else if (text.starts_with("modeled:")) {
        b.kind = BackendKind::Modeled;
        b.preset = std::string(text.substr(8));
        const auto names = fabric_preset_names();
        if (std::find(names.begin(), names.end(), b.preset) == names.end()) {
            throw UsageError(fmt::format("unknown fabric preset '{}'", b.preset));
        }
    } else {
        throw UsageError(fmt::format("unknown backend '{}' (expected local, mapped or modeled:PRESET)", text));
    }
    return b;
}

std::string BackendSpec::label() const {
    return kind == BackendKind::Modeled ? "modeled:" + preset : to_string(kind);
}

EngramConfig default_bench_config() {
    EngramConfig cfg = engram_27b();
    cfg.num_rows = 262'144;
    return cfg;
}

BenchSpec BenchSpec::resolve(Settings settings, std::vector<std::uint32_t> default_batches,
                             std::string default_backends) {
    BenchSpec spec;
    try {
        spec.cfg = config_from(settings, default_bench_config());
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
    store_config(settings, spec.cfg);

    if (!settings.has("backends")) settings.set("backends", default_backends);
    std::vector<std::string> labels;
    const auto items = settings.get_list("backends").value_or(std::vector<std::string>{});
    for (const auto& item : items) {
        spec.backends.push_back(BackendSpec::parse(item));
        labels.push_back(spec.backends.back().label());
    }
    if (spec.backends.empty()) throw UsageError("no backends selected");
    settings.set("backends", join(labels));
    for (const auto& b : spec.backends) {
        if (b.kind == BackendKind::Modeled) {
            try {
                store_fabric(settings, fabric_from(settings, b.preset));
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
        }
    }

    spec.batch_sizes = u32_list(settings, "batch_sizes", default_batches);
    if (spec.batch_sizes.empty()) throw UsageError("batch sizes must not be empty");
    for (auto b : spec.batch_sizes) {
        if (b == 0) throw UsageError("batch sizes must be positive");
    }
    settings.set("batch_sizes", join(spec.batch_sizes));

    spec.repetitions = static_cast<std::uint32_t>(settings.get_u64("repetitions").value_or(20));
    spec.warmup = static_cast<std::uint32_t>(settings.get_u64("warmup").value_or(3));
    spec.workers = static_cast<unsigned>(settings.get_u64("workers").value_or(8));
    spec.seed = settings.get_u64("seed").value_or(1);
    spec.steps = static_cast<std::uint32_t>(settings.get_u64("steps").value_or(16));
    if (spec.repetitions < 1) throw UsageError("repetitions must be >= 1");
    if (spec.workers < 1) throw UsageError("workers must be >= 1");
    if (spec.steps < 1) throw UsageError("steps must be >= 1");
    settings.set("repetitions", std::to_string(spec.repetitions));
    settings.set("warmup", std::to_string(spec.warmup));
    settings.set("workers", std::to_string(spec.workers));
    settings.set("seed", std::to_string(spec.seed));
    settings.set("steps", std::to_string(spec.steps));
    if (auto p = settings.get("table_path"); p && !p->empty()) spec.table_path = *p;

    spec.settings = std::move(settings);
    return spec;
}

std::vector<TokenContext> synthetic_batch(const EngramConfig& cfg, std::uint32_t batch, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::size_t window = std::max<std::uint32_t>(max_ngram_order(cfg), 1);
    std::vector<TokenContext> out(batch);
    for (auto& ctx : out) {
        ctx.token_ids.resize(window);
        for (auto& t : ctx.token_ids) t = draw_token(rng);
        ctx.positions = {window - 1};
    }
    return out;
}

void cmd_build_table(const EngramConfig& cfg, const std::filesystem::path& path, Fill fill) {
    write_table_file(path, cfg, fill);
}

Report cmd_bench_gather(const BenchSpec& spec) {
    BackendSet backends(spec);
    std::string csv = std::string(kGatherSchema) + "\nbatch,backend,p50_ns,p99_ns,mean_ns,bytes,modeled_ns\n";
    std::string md = "# Engram gather latency\n\n"
                     "| Batch | Backend | p50 (ns) | p99 (ns) | mean (ns) | Bytes | Modeled (ns) |\n"
                     "|---:|---|---:|---:|---:|---:|---:|\n";

    for (auto batch : spec.batch_sizes) {
        for (const auto& bspec : spec.backends) {
            const BackendPtr backend = backends.get(bspec);
            const bool modeled = backend->kind() == BackendKind::Modeled;
            std::vector<std::byte> dest(std::uint64_t{batch} * payload_bytes_per_token_layer(spec.cfg));
            std::vector<double> samples;
            std::vector<double> modeled_samples;
            std::uint64_t bytes = 0;
            for (std::uint32_t r = 0; r < spec.warmup + spec.repetitions; ++r) {
                const auto tokens = synthetic_batch(spec.cfg, batch, mix_seed(spec.seed, batch, r));
                const GatherPlan plan = plan_gather(tokens, spec.cfg);
                GatherReport report;
                const double wall = timed_gather(*backend, plan, dest, spec.workers, report);
                if (r < spec.warmup) continue;
                samples.push_back(modeled ? report.modeled_ns : wall);
                modeled_samples.push_back(modeled ? report.modeled_ns : wall);
                bytes = report.bytes_moved;
            }
            const double p50 = nearest_rank(samples, 0.50);
            const double p99 = nearest_rank(samples, 0.99);
            const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / samples.size();
            const double model_p50 = nearest_rank(modeled_samples, 0.50);
            csv += fmt::format("{},{},{},{},{},{},{}\n", batch, bspec.label(), ns(p50), ns(p99), ns(mean), bytes,
                               ns(model_p50));
            md += fmt::format("| {} | {} | {} | {} | {} | {} | {} |\n", batch, bspec.label(), ns(p50), ns(p99),
                              ns(mean), grouped(static_cast<double>(bytes)), ns(model_p50));
        }
    }
    md += "\nModeled backends report fabric-model service time; local and mapped report wall time "
          "(median over repetitions after warmup).\n\n";
    md += settings_block(spec.settings);
    return {csv, md};
}

Report cmd_simulate(const BenchSpec& spec) {
    BackendSet backends(spec);
    const StepTimeline timeline(layer_times_from(spec.settings, spec.cfg), spec.cfg.engram_layers);

    std::string csv = std::string(kSimulateSchema) + "\nbatch,backend,layer,deadline_ns,completion_ns,stall_ns,step_ns\n";
    std::string md = "# Simulated decode throughput\n\n"
                     "| Batch | Backend | Steps | Total (ns) | Tokens/s | Stall total (ns) | Overhead vs baseline |\n"
                     "|---:|---|---:|---:|---:|---:|---:|\n";

    for (auto batch : spec.batch_sizes) {
        const double baseline_ns = timeline.compute_ns() * spec.steps;
        const double baseline_tps = batch * static_cast<double>(spec.steps) / (baseline_ns * 1e-9);
        md += fmt::format("| {} | baseline | {} | {} | {:.1f} | 0.0 | 0.00% |\n", batch, spec.steps, ns(baseline_ns),
                          baseline_tps);

        for (const auto& bspec : spec.backends) {
            const BackendPtr backend = backends.get(bspec);
            // same token stream for every backend at a given batch size
            auto contexts = synthetic_batch(spec.cfg, batch, mix_seed(spec.seed, batch, 0));
            std::mt19937_64 rng(mix_seed(spec.seed, batch, 1));
            double total_ns = 0.0;
            double stall_ns = 0.0;
            for (std::uint32_t step = 0; step < spec.steps; ++step) {
                for (auto& ctx : contexts) {
                    std::rotate(ctx.token_ids.begin(), ctx.token_ids.begin() + 1, ctx.token_ids.end());
                    ctx.token_ids.back() = draw_token(rng);
                }
                const StepRecord rec = simulate_decode_step(spec.cfg, backend, contexts, timeline, spec.workers);
                total_ns += rec.step_ns;
                for (const auto& layer : rec.layers) {
                    stall_ns += layer.stall_ns;
                    csv += fmt::format("{},{},{},{},{},{},{}\n", batch, bspec.label(), layer.layer, ns(layer.deadline_ns),
                                       ns(layer.completion_ns), ns(layer.stall_ns), ns(rec.step_ns));
                }
            }
            const double tps = batch * static_cast<double>(spec.steps) / (total_ns * 1e-9);
            const double overhead = (baseline_tps - tps) / baseline_tps * 100.0;
            md += fmt::format("| {} | {} | {} | {} | {:.1f} | {} | {:.2f}% |\n", batch, bspec.label(), spec.steps,
                              ns(total_ns), tps, ns(stall_ns), overhead);
        }
    }
    md += "\nAll Engram prefetches are issued at step start. Stalls are charged serially into step time, "
          "an upper bound on the real overlap.\n\n";
    md += settings_block(spec.settings);
    return {csv, md};
}

Report cmd_requirements(const Settings& input) {
    Settings settings = input;
    EngramConfig cfg;
    try {
        cfg = config_from(settings, engram_27b());
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
    store_config(settings, cfg);

    analysis::RequirementsInput in = analysis::case_study_defaults();
    in.throughput_tps = settings.get_double("throughput_tps").value_or(in.throughput_tps);
    in.s_layer_bytes =
        settings.get_double("s_layer_bytes").value_or(static_cast<double>(payload_bytes_per_token_layer(cfg)));
    in.n_eng = static_cast<std::uint32_t>(settings.get_u64("n_eng").value_or(cfg.engram_layers.size()));
    in.n_token = static_cast<std::uint32_t>(settings.get_u64("n_token").value_or(in.n_token));
    in.layer_exec_ns = layer_times_from(settings, cfg);
    const double pool_bandwidth = settings.get_double("pool_bandwidth").value_or(12.5e9);

    std::string latency_source;
    if (auto v = settings.get_double("pool_latency_ns")) {
        in.pool_latency_ns = *v;
        latency_source = "given";
    } else {
        const auto bspec = BackendSpec::parse(settings.get("backend").value_or("modeled:cxl"));
        if (bspec.kind != BackendKind::Modeled) {
            throw UsageError("pool_latency_ns is required unless backend is modeled:PRESET");
        }
        const FabricModel model = fabric_from(settings, bspec.preset);
        store_fabric(settings, model);
        settings.set("backend", bspec.label());
        const auto seg = static_cast<double>(segment_bytes(cfg));
        const auto messages = static_cast<std::uint64_t>(std::ceil(in.n_token * in.s_layer_bytes / seg));
        const auto bytes = static_cast<std::uint64_t>(in.n_token * in.s_layer_bytes);
        in.pool_latency_ns = model_latency(model, messages, bytes).service_ns;
        latency_source = bspec.label();
    }
    settings.set("throughput_tps", fmt::format("{}", in.throughput_tps));
    settings.set("s_layer_bytes", fmt::format("{}", in.s_layer_bytes));
    settings.set("n_eng", std::to_string(in.n_eng));
    settings.set("n_token", std::to_string(in.n_token));
    settings.set("pool_bandwidth", fmt::format("{}", pool_bandwidth));

    std::string csv = std::string(kRequirementsSchema) +
                      "\nengram_layer,required_bandwidth_Bps,pool_bandwidth_Bps,bandwidth_ok,prefetch_window_ns,"
                      "pool_latency_ns,latency_ok,bandwidth_margin_Bps,latency_margin_ns\n";
    const double required = analysis::required_bandwidth(in);
    std::string md = "# Engram memory-pool requirements\n\n";
    md += fmt::format("Required bandwidth: {} B/s (≈ {:.1f} GB/s) for T = {} tok/s, S_layer = {} B, N_eng = {}\n\n",
                      grouped(required), required / 1e9, grouped(in.throughput_tps), grouped(in.s_layer_bytes),
                      in.n_eng);
    md += fmt::format("Pool bandwidth: {} B/s ({:.1f} GB/s)\n\n", grouped(pool_bandwidth), pool_bandwidth / 1e9);
    md += fmt::format("Pool latency for N_token = {}: {} ns ({})\n\n", in.n_token, ns(in.pool_latency_ns),
                      latency_source);
    md += "| Layer k | Prefetch window | Bandwidth OK | Latency OK | Latency margin (ns) |\n"
          "|---:|---:|---|---|---:|\n";

    for (auto k : cfg.engram_layers) {
        in.engram_layer = k;
        try {
            analysis::validate(in);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        const auto check = analysis::check_constraints(in, pool_bandwidth);
        csv += fmt::format("{},{:.0f},{:.0f},{},{},{},{},{:.0f},{}\n", k, check.required_bandwidth, pool_bandwidth,
                           check.bandwidth_ok ? 1 : 0, ns(check.prefetch_window_ns), ns(in.pool_latency_ns),
                           check.latency_ok ? 1 : 0, check.bandwidth_margin, ns(check.latency_margin_ns));
        md += fmt::format("| {} | {} ns (≈ {:.0f} µs) | {} | {} | {} |\n", k, grouped(check.prefetch_window_ns),
                          check.prefetch_window_ns / 1e3, check.bandwidth_ok ? "yes" : "no",
                          check.latency_ok ? "yes" : "no", ns(check.latency_margin_ns));
    }
    md += "\n" + settings_block(settings);
    return {csv, md};
}

Report cmd_cost(const Settings& input, bool allow_defaults) {
    Settings settings = input;
    const analysis::CostInput defaults = analysis::component_cost_defaults();
    auto unit = [&](std::string_view key, double fallback) {
        const std::string full = "cost." + std::string(key);
        auto v = settings.get_double(full);
        if (!v && !allow_defaults) throw UsageError(fmt::format("missing {} (flag --{})", full, [&] {
            std::string flag(key);
            std::replace(flag.begin(), flag.end(), '_', '-');
            return flag;
        }()));
        const double value = v.value_or(fallback);
        settings.set(full, fmt::format("{}", value));
        return value;
    };
    analysis::CostInput base;
    base.dram_per_gb = unit("dram_per_gb", defaults.dram_per_gb);
    base.switch_cost = unit("switch_cost", defaults.switch_cost);
    base.adapter_cost = unit("adapter_cost", defaults.adapter_cost);
    base.controller_cost = unit("controller_cost", defaults.controller_cost);

    const auto nodes = u32_list(settings, "cost.nodes", {2, 4, 8, 16});
    settings.set("cost.nodes", join(nodes));

    struct Footprint {
        std::string label;
        double gb;
    };
    std::vector<Footprint> footprints;
    if (auto gbs = settings.get_double_list("cost.table_gb")) {
        for (double gb : *gbs) footprints.push_back({fmt::format("{} GB", gb), gb});
    } else {
        const double bpp = settings.get_double("cost.bytes_per_param").value_or(2.0);
        const auto params = settings.get_double_list("cost.engram_params_b").value_or(std::vector<double>{100, 400});
        std::string joined;
        for (double p : params) {
            footprints.push_back({fmt::format("{}B", p), analysis::table_gb_for_params(p, bpp)});
            joined += (joined.empty() ? "" : ",") + fmt::format("{}", p);
        }
        settings.set("cost.bytes_per_param", fmt::format("{}", bpp));
        settings.set("cost.engram_params_b", joined);
    }

    std::string csv = std::string(kCostSchema) + "\nengram,nodes,table_gb,local_cost,pool_cost,savings\n";
    std::string md = "# Engram storage cost: local DRAM vs CXL pool\n\n"
                     "| Engram | Nodes | Local | CXL Pool | Savings |\n"
                     "|---|---:|---:|---:|---:|\n";
    for (const auto& fp : footprints) {
        for (auto n : nodes) {
            analysis::CostInput c = base;
            c.nodes = n;
            c.table_gb = fp.gb;
            try {
                analysis::validate(c);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            const double local = analysis::local_cost(c);
            const double pool = analysis::pool_cost(c);
            const double save = analysis::savings(c);
            csv += fmt::format("{},{},{},{:.2f},{:.2f},{:.2f}\n", fp.label, n, fp.gb, local, pool, save);
            md += fmt::format("| {} | {} | {} | {} | {} |\n", fp.label, n, format_dollars(local), format_dollars(pool),
                              format_dollars(save));
        }
    }
    md += "\nGB = 10^9 bytes. The pool column is one switch, one adapter and one controller per node, and a "
          "single shared copy of the table.\n\n";
    md += settings_block(settings);
    return {csv, md};
}

std::string format_dollars(double amount) {
    const double cents = std::round(amount * 100.0) / 100.0;
    std::string body = grouped(std::fabs(cents));
    return (cents < 0 ? "-$" : "$") + body;
}

}  // namespace engram::cli
