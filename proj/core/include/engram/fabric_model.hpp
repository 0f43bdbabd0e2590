#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace engram {

/// Analytic interconnect latency model. A gather of `messages` discrete
/// segments totalling `bytes` completes after
///
///   base_latency_ns + ceil(messages / max_inflight) * per_message_ns
///                   + bytes * per_byte_ns
///
/// Asymptotic peak bandwidth is 1 / per_byte_ns bytes per nanosecond.
struct FabricModel {
    std::string name;
    double base_latency_ns = 0.0;
    double per_message_ns = 0.0;
    double per_byte_ns = 0.0;
    std::uint32_t max_inflight = 1;

    /// Throws std::invalid_argument on negative parameters or zero inflight.
    void validate() const;

    bool operator==(const FabricModel&) const = default;
};

struct ModeledLatency {
    double service_ns = 0.0;
    std::uint64_t bytes_moved = 0;
    std::uint64_t messages = 0;
};

namespace presets {
FabricModel dram();
FabricModel cxl();
FabricModel rdma();
/// Zero-cost fabric; every gather completes at the issue instant.
FabricModel instant();
}  // namespace presets

/// Looks up a shipped preset by name ("dram", "cxl", "rdma", "instant").
/// Throws std::invalid_argument for unknown names.
FabricModel fabric_preset(std::string_view name);

std::vector<std::string> fabric_preset_names();

ModeledLatency model_latency(const FabricModel& model, std::uint64_t messages, std::uint64_t bytes);

/// Bytes per second for `messages` reads of `message_bytes` each.
/// Requires messages >= 1.
double effective_bandwidth(const FabricModel& model, std::uint64_t message_bytes, std::uint64_t messages);

/// 1 / per_byte_ns, in bytes per second. Infinite for a zero per-byte cost.
double peak_bandwidth(const FabricModel& model);

}  // namespace engram
