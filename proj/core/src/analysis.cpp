#include "engram/analysis.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace engram::analysis {

RequirementsInput case_study_defaults() {
    RequirementsInput in;
    in.throughput_tps = 70'000.0;
    in.s_layer_bytes = 5'120.0;
    in.n_eng = 2;
    in.n_token = 256;
    in.layer_exec_ns.assign(64, 3'600'000.0 / 64);
    in.engram_layer = 2;
    in.pool_latency_ns = 0.0;
    return in;
}

void validate(const RequirementsInput& in) {
    if (in.throughput_tps <= 0 || in.s_layer_bytes <= 0 || in.n_token == 0 || in.pool_latency_ns < 0) {
        throw std::invalid_argument("requirements inputs must be positive");
    }
    if (in.engram_layer < 1 || in.engram_layer > in.layer_exec_ns.size()) {
        throw std::invalid_argument("engram layer outside the layer list");
    }
    for (double t : in.layer_exec_ns) {
        if (t <= 0) throw std::invalid_argument("layer execution times must be positive");
    }
}

double required_bandwidth(const RequirementsInput& in) {
    return in.throughput_tps * in.s_layer_bytes * static_cast<double>(in.n_eng);
}

double prefetch_window(const RequirementsInput& in) {
    const auto k = in.engram_layer;
    if (k < 1 || k > in.layer_exec_ns.size()) {
        throw std::out_of_range("engram layer " + std::to_string(k) + " outside " +
                                std::to_string(in.layer_exec_ns.size()) + " layers");
    }
    return std::accumulate(in.layer_exec_ns.begin(), in.layer_exec_ns.begin() + (k - 1), 0.0);
}

ConstraintCheck check_constraints(const RequirementsInput& in, double pool_bandwidth) {
    ConstraintCheck out;
    out.required_bandwidth = required_bandwidth(in);
    out.prefetch_window_ns = prefetch_window(in);
    out.bandwidth_ok = pool_bandwidth > out.required_bandwidth;
    out.latency_ok = in.pool_latency_ns < out.prefetch_window_ns;
    out.bandwidth_margin = pool_bandwidth - out.required_bandwidth;
    out.latency_margin_ns = out.prefetch_window_ns - in.pool_latency_ns;
    return out;
}

CostInput component_cost_defaults() {
    CostInput c;
    c.dram_per_gb = 15.0;
    c.switch_cost = 5'800.0;
    c.adapter_cost = 210.0;
    c.controller_cost = 300.0;
    return c;
}

void validate(const CostInput& c) {
    if (c.dram_per_gb < 0 || c.switch_cost < 0 || c.adapter_cost < 0 || c.controller_cost < 0 || c.table_gb < 0) {
        throw std::invalid_argument("cost inputs must be non-negative");
    }
    if (c.nodes < 1) throw std::invalid_argument("nodes must be >= 1");
}

double table_gb_for_params(double params_billions, double bytes_per_param) {
    return params_billions * bytes_per_param;
}

double local_cost(const CostInput& c) {
    return static_cast<double>(c.nodes) * c.table_gb * c.dram_per_gb;
}

double pool_cost(const CostInput& c) {
    return c.switch_cost + static_cast<double>(c.nodes) * (c.adapter_cost + c.controller_cost) +
           c.table_gb * c.dram_per_gb;
}

double savings(const CostInput& c) { return local_cost(c) - pool_cost(c); }

}  // namespace engram::analysis
