#include "engram/retrieval_engine.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace engram {

StepTimeline::StepTimeline(std::vector<double> layer_exec_ns, std::vector<std::uint32_t> engram_layers)
    : layer_exec_ns_(std::move(layer_exec_ns)), engram_layers_(std::move(engram_layers)) {
    for (double t : layer_exec_ns_) {
        if (t < 0) throw std::invalid_argument("layer execution time must be non-negative");
    }
    for (auto k : engram_layers_) {
        if (k < 1 || k > layer_exec_ns_.size()) throw std::invalid_argument("engram layer out of range");
    }
    if (!std::is_sorted(engram_layers_.begin(), engram_layers_.end())) {
        throw std::invalid_argument("engram layers must be sorted");
    }
    prefix_ns_.resize(layer_exec_ns_.size() + 1, 0.0);
    std::partial_sum(layer_exec_ns_.begin(), layer_exec_ns_.end(), prefix_ns_.begin() + 1);
}

StepTimeline StepTimeline::uniform(std::uint32_t total_layers, double step_ns,
                                   std::vector<std::uint32_t> engram_layers) {
    if (total_layers == 0) throw std::invalid_argument("timeline needs at least one layer");
    return StepTimeline(std::vector<double>(total_layers, step_ns / total_layers), std::move(engram_layers));
}

bool StepTimeline::is_engram_layer(std::uint32_t k) const {
    return std::binary_search(engram_layers_.begin(), engram_layers_.end(), k);
}

double StepTimeline::deadline_ns(std::uint32_t k) const {
    if (k < 1 || k > layer_exec_ns_.size()) throw std::out_of_range("layer " + std::to_string(k) + " out of range");
    return prefix_ns_[k - 1];
}

double StepTimeline::record_completion(std::uint32_t k, double completion_ns) {
    if (!is_engram_layer(k)) throw std::invalid_argument("layer " + std::to_string(k) + " is not an Engram layer");
    LayerStall s;
    s.layer = k;
    s.deadline_ns = deadline_ns(k);
    s.completion_ns = completion_ns;
    s.stall_ns = std::max(0.0, completion_ns - s.deadline_ns);
    stalls_.push_back(s);
    return s.stall_ns;
}

double StepTimeline::compute_ns() const { return prefix_ns_.back(); }

double StepTimeline::total_stall_ns() const {
    double total = 0.0;
    for (const auto& s : stalls_) total += s.stall_ns;
    return total;
}

double StepTimeline::step_ns() const { return compute_ns() + total_stall_ns(); }

bool PrefetchHandle::ready() const {
    if (complete_) return true;
    return pending_.valid() && pending_.wait_for(std::chrono::seconds(0)) == std::future_status::ready;
}

const GatherReport& PrefetchHandle::wait() {
    if (!valid()) throw std::logic_error("wait on an empty prefetch handle");
    if (!complete_) {
        report_ = pending_.get();
        complete_ = true;
    }
    return report_;
}

double PrefetchHandle::completion_ns() {
    const auto& r = wait();
    return state_->backend->kind() == BackendKind::Modeled ? r.modeled_ns : r.wall_ns;
}

std::span<const std::byte> PrefetchHandle::data() {
    wait();
    return state_->buffer;
}

std::vector<std::byte> PrefetchHandle::take_buffer() {
    wait();
    return std::move(state_->buffer);
}

PrefetchHandle issue_prefetch(BackendPtr backend, GatherPlan plan, unsigned workers) {
    if (!backend) throw std::invalid_argument("issue_prefetch needs a backend");
    PrefetchHandle handle;
    handle.state_ = std::make_shared<PrefetchHandle::State>();
    handle.state_->backend = std::move(backend);
    handle.state_->plan = std::move(plan);
    handle.state_->buffer.resize(handle.state_->plan.total_bytes());
    handle.pending_ = std::async(std::launch::async, [state = handle.state_, workers] {
        return read_segments(*state->backend, state->plan, state->buffer, workers);
    });
    return handle;
}

double await_before_layer(PrefetchHandle& handle, StepTimeline& timeline, std::uint32_t k) {
    if (!timeline.is_engram_layer(k)) {
        throw std::invalid_argument("layer " + std::to_string(k) + " is not an Engram layer");
    }
    return timeline.record_completion(k, handle.completion_ns());
}

StepRecord simulate_decode_step(const EngramConfig& cfg, const BackendPtr& backend,
                                std::span<const TokenContext> batch, const StepTimeline& timeline,
                                unsigned workers) {
    validate_config(cfg);
    if (!std::equal(cfg.engram_layers.begin(), cfg.engram_layers.end(), timeline.engram_layers().begin(),
                    timeline.engram_layers().end())) {
        throw std::invalid_argument("timeline Engram layers do not match config");
    }
    StepTimeline clock = timeline;
    StepRecord record;
    record.compute_ns = clock.compute_ns();

    const GatherPlan plan = plan_gather(batch, cfg);
    if (!plan.empty()) {
        std::vector<PrefetchHandle> handles;
        handles.reserve(cfg.engram_layers.size());
        for (std::size_t i = 0; i < cfg.engram_layers.size(); ++i) {
            handles.push_back(issue_prefetch(backend, plan, workers));
        }
        for (std::size_t i = 0; i < cfg.engram_layers.size(); ++i) {
            record.bytes_moved += handles[i].wait().bytes_moved;
            await_before_layer(handles[i], clock, cfg.engram_layers[i]);
        }
    }
    record.layers.assign(clock.stalls().begin(), clock.stalls().end());
    record.step_ns = clock.step_ns();
    return record;
}

}  // namespace engram
