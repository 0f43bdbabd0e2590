#include "engram/fabric_model.hpp"

#include <limits>
#include <stdexcept>

namespace engram {

void FabricModel::validate() const {
    if (base_latency_ns < 0 || per_message_ns < 0 || per_byte_ns < 0) {
        throw std::invalid_argument("fabric model '" + name + "': parameters must be non-negative");
    }
    if (max_inflight < 1) throw std::invalid_argument("fabric model '" + name + "': max_inflight must be >= 1");
}

namespace presets {

FabricModel dram() { return {"dram", 100.0, 5.0, 0.01, 64}; }
FabricModel cxl() { return {"cxl", 400.0, 20.0, 0.015, 64}; }
FabricModel rdma() { return {"rdma", 2'000.0, 600.0, 0.008, 32}; }
FabricModel instant() { return {"instant", 0.0, 0.0, 0.0, 1}; }

}  // namespace presets

FabricModel fabric_preset(std::string_view name) {
    if (name == "dram") return presets::dram();
    if (name == "cxl") return presets::cxl();
    if (name == "rdma") return presets::rdma();
    if (name == "instant") return presets::instant();
    throw std::invalid_argument("unknown fabric preset '" + std::string(name) + "'");
}

std::vector<std::string> fabric_preset_names() { return {"dram", "cxl", "rdma", "instant"}; }

ModeledLatency model_latency(const FabricModel& model, std::uint64_t messages, std::uint64_t bytes) {
    ModeledLatency out;
    out.messages = messages;
    out.bytes_moved = bytes;
    if (messages == 0) return out;
    const std::uint64_t waves = (messages + model.max_inflight - 1) / model.max_inflight;
    out.service_ns = model.base_latency_ns + static_cast<double>(waves) * model.per_message_ns +
                     static_cast<double>(bytes) * model.per_byte_ns;
    return out;
}

double effective_bandwidth(const FabricModel& model, std::uint64_t message_bytes, std::uint64_t messages) {
    if (messages == 0) throw std::invalid_argument("effective_bandwidth requires messages >= 1");
    const std::uint64_t bytes = message_bytes * messages;
    const double ns = model_latency(model, messages, bytes).service_ns;
    if (ns <= 0.0) return std::numeric_limits<double>::infinity();
    return static_cast<double>(bytes) / ns * 1e9;
}

double peak_bandwidth(const FabricModel& model) {
    if (model.per_byte_ns <= 0.0) return std::numeric_limits<double>::infinity();
    return 1e9 / model.per_byte_ns;
}

}  // namespace engram
