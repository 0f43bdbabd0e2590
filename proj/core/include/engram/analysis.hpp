#pragma once

#include <cstdint>
#include <vector>

namespace engram::analysis {

/// Inputs to the pooled-memory bandwidth and latency requirements.
struct RequirementsInput {
    double throughput_tps = 0.0;           // T
    double s_layer_bytes = 0.0;            // bytes per token per Engram layer
    std::uint32_t n_eng = 0;               // Engram layers
    std::uint32_t n_token = 0;             // tokens retrieving per step
    std::vector<double> layer_exec_ns;     // per-layer compute time
    std::uint32_t engram_layer = 1;        // k, 1-based
    double pool_latency_ns = 0.0;          // per-layer retrieval latency
};

/// Qwen3-32B serving case: 70k tok/s, 5,120 B/token/layer, Engram at
/// k=2 (and 15) in a 64-layer, 3.6 ms decode step, batch 256.
RequirementsInput case_study_defaults();

/// Throws std::invalid_argument on non-positive rates or an out-of-range k.
void validate(const RequirementsInput& in);

/// Minimum average pool bandwidth in bytes/s: T * S_layer * N_eng.
double required_bandwidth(const RequirementsInput& in);

/// Compute time of the layers preceding layer k. Throws std::out_of_range
/// if k is 0 or past the last layer.
double prefetch_window(const RequirementsInput& in);

struct ConstraintCheck {
    bool bandwidth_ok = false;
    bool latency_ok = false;
    double required_bandwidth = 0.0;
    double prefetch_window_ns = 0.0;
    /// pool_bandwidth - required; positive is headroom.
    double bandwidth_margin = 0.0;
    /// window - pool latency; positive is headroom.
    double latency_margin_ns = 0.0;
};

/// Both inequalities are strict.
ConstraintCheck check_constraints(const RequirementsInput& in, double pool_bandwidth);

/// GB here is 10^9 bytes. Currency units are whatever dram_per_gb uses.
struct CostInput {
    double dram_per_gb = 0.0;
    double switch_cost = 0.0;
    double adapter_cost = 0.0;
    double controller_cost = 0.0;
    std::uint32_t nodes = 1;
    double table_gb = 0.0;
};

/// Unit costs from the DRAM vs CXL component price list: $15/GB DDR5,
/// $5,800 switch, $210 adapter, $300 controller.
CostInput component_cost_defaults();

/// Throws std::invalid_argument on negative costs or zero nodes.
void validate(const CostInput& c);

/// Engram footprint for a parameter count, at `bytes_per_param` bytes each.
double table_gb_for_params(double params_billions, double bytes_per_param = 2.0);

/// Every node holds a full copy in local DRAM.
double local_cost(const CostInput& c);
/// One shared pool: switch + per-node adapter/controller pair + one copy.
double pool_cost(const CostInput& c);
double savings(const CostInput& c);

}  // namespace engram::analysis
