#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "engram_cli/commands.hpp"

namespace engram::cli {
namespace {

struct CommonFlags {
    std::string config;
    std::vector<std::string> backends;
    std::vector<std::uint32_t> batch_sizes;
    std::optional<unsigned> workers;
    std::optional<std::uint32_t> steps;
    std::optional<std::uint32_t> repetitions;
    std::optional<std::uint32_t> warmup;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> rows;
    std::string table;
    std::string out;
};

void add_config_flag(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "key = value settings file")->envname("ENGRAM_POOL_CONFIG");
}

void add_bench_flags(CLI::App* cmd, CommonFlags& f) {
    add_config_flag(cmd, f);
    cmd->add_option("--backend", f.backends, "local | mapped | modeled:PRESET (repeatable, comma separated)")
        ->delimiter(',');
    cmd->add_option("--batch-sizes", f.batch_sizes, "comma separated batch sizes")->delimiter(',');
    cmd->add_option("--workers", f.workers, "gather worker threads");
    cmd->add_option("--repetitions", f.repetitions, "measured repetitions per point");
    cmd->add_option("--warmup", f.warmup, "warmup repetitions per point");
    cmd->add_option("--seed", f.seed, "synthetic token stream seed");
    cmd->add_option("--rows", f.rows, "override num_rows");
    cmd->add_option("--table", f.table, "table file (required for mapped)");
    cmd->add_option("--out", f.out, "CSV output path; the markdown summary goes next to it as .md");
}

Settings base_settings(const CommonFlags& f) {
    Settings s = f.config.empty() ? Settings{} : Settings::load(f.config);
    if (!f.backends.empty()) {
        std::string joined;
        for (const auto& b : f.backends) joined += (joined.empty() ? "" : ",") + b;
        s.set("backends", joined);
    }
    if (!f.batch_sizes.empty()) s.set("batch_sizes", join(f.batch_sizes));
    if (f.workers) s.set("workers", std::to_string(*f.workers));
    if (f.steps) s.set("steps", std::to_string(*f.steps));
    if (f.repetitions) s.set("repetitions", std::to_string(*f.repetitions));
    if (f.warmup) s.set("warmup", std::to_string(*f.warmup));
    if (f.seed) s.set("seed", std::to_string(*f.seed));
    if (f.rows) s.set("num_rows", std::to_string(*f.rows));
    if (!f.table.empty()) s.set("table_path", f.table);
    return s;
}

void emit(const Report& report, const std::string& out) {
    if (!out.empty()) {
        std::filesystem::path csv_path(out);
        std::ofstream csv(csv_path, std::ios::binary);
        csv << report.csv;
        auto md_path = csv_path;
        md_path.replace_extension(".md");
        std::ofstream md(md_path, std::ios::binary);
        md << report.markdown;
        if (!csv || !md) throw std::runtime_error("cannot write report to " + out);
    }
    std::cout << report.markdown;
}

template <typename T>
void set_if(Settings& s, const std::string& key, const std::optional<T>& v) {
    if (v) s.set(key, fmt::format("{}", *v));
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Engram pooled-memory retrieval benchmarks and models"};
    app.require_subcommand(1);

    CommonFlags build_flags;
    std::string fill = "random";
    auto* build = app.add_subcommand("build-table", "write a table file");
    add_config_flag(build, build_flags);
    build->add_option("--out", build_flags.out, "table file path")->required();
    build->add_option("--rows", build_flags.rows, "override num_rows");
    build->add_option("--fill", fill, "zeros | random")->check(CLI::IsMember({"zeros", "random"}));

    CommonFlags gather_flags;
    auto* gather = app.add_subcommand("bench-gather", "gather latency sweep over batch sizes");
    add_bench_flags(gather, gather_flags);

    CommonFlags sim_flags;
    auto* simulate = app.add_subcommand("simulate", "simulated decode steps with Engram prefetch");
    add_bench_flags(simulate, sim_flags);
    simulate->add_option("--steps", sim_flags.steps, "decode steps per point");

    CommonFlags req_flags;
    std::optional<double> throughput, s_layer, pool_latency, pool_bandwidth, step_ns;
    std::optional<std::uint64_t> n_token;
    std::string req_backend;
    auto* requirements = app.add_subcommand("requirements", "bandwidth and prefetch-window requirements");
    add_config_flag(requirements, req_flags);
    requirements->add_option("--throughput", throughput, "tokens/s");
    requirements->add_option("--s-layer-bytes", s_layer, "bytes per token per Engram layer");
    requirements->add_option("--n-token", n_token, "tokens retrieving per step");
    requirements->add_option("--step-ns", step_ns, "decode step time, split evenly over layers");
    requirements->add_option("--pool-latency-ns", pool_latency, "measured pool latency per layer");
    requirements->add_option("--pool-bandwidth", pool_bandwidth, "pool bandwidth, bytes/s");
    requirements->add_option("--backend", req_backend, "modeled:PRESET used when no latency is given");
    requirements->add_option("--out", req_flags.out, "CSV output path");

    CommonFlags cost_flags;
    std::optional<double> dram_per_gb, switch_cost, adapter_cost, controller_cost, bytes_per_param;
    std::vector<std::uint32_t> nodes;
    std::vector<double> params_b, table_gb;
    auto* cost = app.add_subcommand("cost", "local DRAM vs pooled memory cost comparison");
    add_config_flag(cost, cost_flags);
    cost->add_option("--dram-per-gb", dram_per_gb, "DRAM price, $/GB");
    cost->add_option("--switch-cost", switch_cost, "fabric switch, $");
    cost->add_option("--adapter-cost", adapter_cost, "per-node host adapter, $");
    cost->add_option("--controller-cost", controller_cost, "per-node memory controller, $");
    cost->add_option("--nodes", nodes, "node counts, comma separated")->delimiter(',');
    cost->add_option("--engram-params-b", params_b, "Engram sizes in billions of parameters")->delimiter(',');
    cost->add_option("--bytes-per-param", bytes_per_param, "table bytes per parameter");
    cost->add_option("--table-gb", table_gb, "footprints in GB (overrides --engram-params-b)")->delimiter(',');
    cost->add_option("--out", cost_flags.out, "CSV output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*build) {
            Settings s = base_settings(build_flags);
            EngramConfig cfg;
            try {
                cfg = config_from(s, default_bench_config());
            } catch (const ConfigError& e) {
                throw UsageError(e.what());
            }
            cmd_build_table(cfg, build_flags.out, fill == "zeros" ? Fill::Zeros : Fill::SeededRandom);
            std::cout << "wrote " << build_flags.out << " (" << TableFileHeader::kSize + table_bytes(cfg)
                      << " bytes)\n";
        } else if (*gather) {
            auto spec = BenchSpec::resolve(base_settings(gather_flags), {1, 2, 4, 8, 16, 32, 64, 128, 256, 512},
                                           "local,modeled:dram,modeled:cxl,modeled:rdma");
            emit(cmd_bench_gather(spec), gather_flags.out);
        } else if (*simulate) {
            auto spec = BenchSpec::resolve(base_settings(sim_flags), {256}, "modeled:dram,modeled:cxl,modeled:rdma");
            emit(cmd_simulate(spec), sim_flags.out);
        } else if (*requirements) {
            Settings s = req_flags.config.empty() ? Settings{} : Settings::load(req_flags.config);
            set_if(s, "throughput_tps", throughput);
            set_if(s, "s_layer_bytes", s_layer);
            set_if(s, "n_token", n_token);
            set_if(s, "step_ns", step_ns);
            set_if(s, "pool_latency_ns", pool_latency);
            set_if(s, "pool_bandwidth", pool_bandwidth);
            if (!req_backend.empty()) s.set("backend", req_backend);
            emit(cmd_requirements(s), req_flags.out);
        } else if (*cost) {
            Settings s = cost_flags.config.empty() ? Settings{} : Settings::load(cost_flags.config);
            set_if(s, "cost.dram_per_gb", dram_per_gb);
            set_if(s, "cost.switch_cost", switch_cost);
            set_if(s, "cost.adapter_cost", adapter_cost);
            set_if(s, "cost.controller_cost", controller_cost);
            set_if(s, "cost.bytes_per_param", bytes_per_param);
            if (!nodes.empty()) s.set("cost.nodes", join(nodes));
            auto join_d = [](const std::vector<double>& v) {
                std::string out;
                for (double x : v) out += (out.empty() ? "" : ",") + fmt::format("{}", x);
                return out;
            };
            if (!params_b.empty()) s.set("cost.engram_params_b", join_d(params_b));
            if (!table_gb.empty()) s.set("cost.table_gb", join_d(table_gb));
            // built-in component prices only apply when no settings file is in play
            emit(cmd_cost(s, cost_flags.config.empty()), cost_flags.out);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace engram::cli
