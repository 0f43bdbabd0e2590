#pragma once

#include <cstddef>
#include <cstdint>
#include <future>
#include <memory>
#include <span>
#include <vector>

#include "engram/backends.hpp"
#include "engram/config.hpp"
#include "engram/ngram_indexer.hpp"

namespace engram {

/// Outcome of one Engram layer within a decode step.
struct LayerStall {
    std::uint32_t layer = 0;
    double deadline_ns = 0.0;
    double completion_ns = 0.0;
    double stall_ns = 0.0;
};

/// Simulated compute clock for one decode step. Retrieval for every Engram
/// layer is issued at instant 0; layer k's deadline is the summed compute
/// time of layers 1..k-1.
class StepTimeline {
public:
    StepTimeline(std::vector<double> layer_exec_ns, std::vector<std::uint32_t> engram_layers);

    /// `total_layers` layers sharing step_ns equally.
    static StepTimeline uniform(std::uint32_t total_layers, double step_ns,
                                std::vector<std::uint32_t> engram_layers);

    std::span<const double> layer_exec_ns() const { return layer_exec_ns_; }
    std::span<const std::uint32_t> engram_layers() const { return engram_layers_; }
    bool is_engram_layer(std::uint32_t k) const;

    /// Throws std::out_of_range when k is not in [1, layer count].
    double deadline_ns(std::uint32_t k) const;

    /// Records max(0, completion - deadline(k)) for Engram layer k and
    /// returns it. Throws std::invalid_argument if k is not an Engram layer.
    double record_completion(std::uint32_t k, double completion_ns);

    double compute_ns() const;
    double total_stall_ns() const;
    /// compute_ns() + total_stall_ns(); stalls are charged serially.
    double step_ns() const;
    std::span<const LayerStall> stalls() const { return stalls_; }

private:
    std::vector<double> layer_exec_ns_;
    std::vector<double> prefix_ns_;
    std::vector<std::uint32_t> engram_layers_;
    std::vector<LayerStall> stalls_;
};

/// An in-flight gather. The destination buffer is owned by the gather until
/// wait() returns, after which data() may be read.
class PrefetchHandle {
public:
    PrefetchHandle() = default;

    bool valid() const { return state_ != nullptr; }
    bool ready() const;
    /// Blocks until the gather lands. Rethrows any gather error.
    const GatherReport& wait();
    double completion_ns();
    std::span<const std::byte> data();
    std::vector<std::byte> take_buffer();

private:
    friend PrefetchHandle issue_prefetch(BackendPtr, GatherPlan, unsigned);

    struct State {
        BackendPtr backend;
        GatherPlan plan;
        std::vector<std::byte> buffer;
    };
    std::shared_ptr<State> state_;
    std::future<GatherReport> pending_;
    GatherReport report_{};
    bool complete_ = false;
};

/// Starts a gather on a background thread and returns immediately.
/// Errors surface from wait().
PrefetchHandle issue_prefetch(BackendPtr backend, GatherPlan plan, unsigned workers);

/// Waits for the handle and charges any overrun against layer k's deadline.
double await_before_layer(PrefetchHandle& handle, StepTimeline& timeline, std::uint32_t k);

struct StepRecord {
    double step_ns = 0.0;
    double compute_ns = 0.0;
    std::vector<LayerStall> layers;
    std::uint64_t bytes_moved = 0;
};

/// Runs one decode step: plans the batch, issues one prefetch per Engram
/// layer at step start, then walks the layers awaiting each prefetch at its
/// deadline. `timeline` supplies layer durations; its Engram layers must
/// match cfg.
StepRecord simulate_decode_step(const EngramConfig& cfg, const BackendPtr& backend,
                                std::span<const TokenContext> batch, const StepTimeline& timeline,
                                unsigned workers = 1);

}  // namespace engram
