#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "engram/config.hpp"
#include "engram/fabric_model.hpp"
#include "engram/ngram_indexer.hpp"
#include "engram/table_file.hpp"

namespace engram {

class BoundsError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

enum class BackendKind { LocalMemory, MappedFile, Modeled };

const char* to_string(BackendKind kind);

/// Read-only segment store. Contents never change after construction, so a
/// backend may be shared by any number of concurrent readers.
class StorageBackend {
public:
    virtual ~StorageBackend() = default;

    virtual BackendKind kind() const = 0;
    virtual std::span<const std::byte> region() const = 0;
    /// Non-null only for Modeled backends.
    virtual const FabricModel* fabric() const { return nullptr; }
    virtual std::string label() const = 0;

    std::uint64_t region_len() const { return region().size(); }
};

using BackendPtr = std::shared_ptr<const StorageBackend>;

class LocalMemoryBackend final : public StorageBackend {
public:
    /// Allocates table_bytes(cfg) and fills it in place.
    LocalMemoryBackend(const EngramConfig& cfg, Fill fill);
    /// Copies the payload of a table file into process memory.
    LocalMemoryBackend(const std::filesystem::path& path, const EngramConfig& cfg);

    BackendKind kind() const override { return BackendKind::LocalMemory; }
    std::span<const std::byte> region() const override { return {data_.get(), size_}; }
    std::string label() const override { return "local"; }

private:
    struct Unmap {
        std::size_t len;
        void operator()(std::byte* p) const;
    };
    void allocate(std::size_t size);

    std::unique_ptr<std::byte, Unmap> data_{nullptr, Unmap{0}};
    std::size_t size_ = 0;
};

/// Read-only mmap of a table file's payload; stands in for a DAX-mapped
/// pooled-memory device.
class MappedFileBackend final : public StorageBackend {
public:
    MappedFileBackend(const std::filesystem::path& path, const EngramConfig& cfg);
    ~MappedFileBackend() override;
    MappedFileBackend(const MappedFileBackend&) = delete;
    MappedFileBackend& operator=(const MappedFileBackend&) = delete;

    BackendKind kind() const override { return BackendKind::MappedFile; }
    std::span<const std::byte> region() const override;
    std::string label() const override { return "mapped"; }

private:
    void* map_ = nullptr;
    std::size_t map_len_ = 0;
};

/// Serves bytes from an inner backend and charges FabricModel latency.
class ModeledBackend final : public StorageBackend {
public:
    ModeledBackend(BackendPtr inner, FabricModel model);

    BackendKind kind() const override { return BackendKind::Modeled; }
    std::span<const std::byte> region() const override { return inner_->region(); }
    const FabricModel* fabric() const override { return &model_; }
    std::string label() const override { return "modeled:" + model_.name; }
    const StorageBackend& inner() const { return *inner_; }

private:
    BackendPtr inner_;
    FabricModel model_;
};

/// Opens a table file as LocalMemory or MappedFile. For Modeled, wraps a
/// LocalMemory load with `model` (required).
BackendPtr load_table(const std::filesystem::path& path, const EngramConfig& cfg, BackendKind kind,
                      const std::optional<FabricModel>& model = std::nullopt);

/// Builds an in-memory table directly from cfg, optionally wrapped in a model.
BackendPtr load_table(const EngramConfig& cfg, Fill fill,
                      const std::optional<FabricModel>& model = std::nullopt);

struct GatherReport {
    std::uint64_t bytes_moved = 0;
    std::uint64_t messages = 0;
    double wall_ns = 0.0;
    /// Fabric-model service time for Modeled backends, wall_ns otherwise.
    double modeled_ns = 0.0;
};

/// Throws BoundsError if any address falls outside the backend region.
void check_plan_bounds(const StorageBackend& backend, const GatherPlan& plan);

/// Copies every planned segment into `destination` in plan order, fanned
/// out over `workers` threads. All addresses are validated before any byte
/// moves. Returns after every segment has landed.
GatherReport read_segments(const StorageBackend& backend, const GatherPlan& plan,
                           std::span<std::byte> destination, unsigned workers);

}  // namespace engram
