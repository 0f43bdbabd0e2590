#include "engram/backends.hpp"

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <system_error>
#include <vector>

namespace engram {
namespace {

// Segments are independent random reads; touching a few ahead keeps several
// cache misses in flight per worker.
constexpr std::int64_t kPrefetchDistance = 16;
constexpr std::uint64_t kCacheLine = 64;

class FileDescriptor {
public:
    explicit FileDescriptor(const std::filesystem::path& path) : fd_(::open(path.c_str(), O_RDONLY | O_CLOEXEC)) {
        if (fd_ < 0) throw std::system_error(errno, std::generic_category(), "cannot open table " + path.string());
    }
    ~FileDescriptor() { ::close(fd_); }
    FileDescriptor(const FileDescriptor&) = delete;
    FileDescriptor& operator=(const FileDescriptor&) = delete;
    int get() const { return fd_; }

private:
    int fd_;
};

void check_file_geometry(const std::filesystem::path& path, const EngramConfig& cfg) {
    validate_config(cfg);
    check_header_matches(read_table_header(path), cfg);
    const auto size = std::filesystem::file_size(path);
    if (size < TableFileHeader::kSize + table_bytes(cfg)) throw TableFormatError("region too small: " + path.string());
}

}  // namespace

const char* to_string(BackendKind kind) {
    switch (kind) {
        case BackendKind::LocalMemory: return "local";
        case BackendKind::MappedFile: return "mapped";
        case BackendKind::Modeled: return "modeled";
    }
    return "?";
}

void LocalMemoryBackend::Unmap::operator()(std::byte* p) const {
    if (p != nullptr) ::munmap(p, len);
}

// Anonymous mapping so the table can sit on transparent huge pages; random
// segment reads are otherwise dominated by TLB misses.
void LocalMemoryBackend::allocate(std::size_t size) {
    void* p = ::mmap(nullptr, size, PROT_READ | PROT_WRITE, MAP_PRIVATE | MAP_ANONYMOUS, -1, 0);
    if (p == MAP_FAILED) throw std::system_error(errno, std::generic_category(), "cannot allocate table");
    ::madvise(p, size, MADV_HUGEPAGE);
    data_ = std::unique_ptr<std::byte, Unmap>(static_cast<std::byte*>(p), Unmap{size});
    size_ = size;
}

LocalMemoryBackend::LocalMemoryBackend(const EngramConfig& cfg, Fill fill) {
    allocate(table_bytes(validate_config(cfg)));
    constexpr std::size_t kChunk = 4 << 20;
    const auto chunks = static_cast<std::int64_t>((size_ + kChunk - 1) / kChunk);
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < chunks; ++c) {
        const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
        const std::size_t n = std::min(kChunk, size_ - begin);
        fill_payload({data_.get() + begin, n}, fill, cfg.hash_seed, begin);
    }
}

LocalMemoryBackend::LocalMemoryBackend(const std::filesystem::path& path, const EngramConfig& cfg) {
    check_file_geometry(path, cfg);
    allocate(table_bytes(cfg));
    std::ifstream in(path, std::ios::binary);
    in.seekg(TableFileHeader::kSize);
    in.read(reinterpret_cast<char*>(data_.get()), static_cast<std::streamsize>(size_));
    if (in.gcount() != static_cast<std::streamsize>(size_)) throw TableFormatError("region too small: " + path.string());
}

MappedFileBackend::MappedFileBackend(const std::filesystem::path& path, const EngramConfig& cfg) {
    check_file_geometry(path, cfg);
    FileDescriptor fd(path);
    map_len_ = TableFileHeader::kSize + table_bytes(cfg);
    map_ = ::mmap(nullptr, map_len_, PROT_READ, MAP_SHARED, fd.get(), 0);
    if (map_ == MAP_FAILED) {
        map_ = nullptr;
        throw std::system_error(errno, std::generic_category(), "mmap failed for " + path.string());
    }
    ::madvise(map_, map_len_, MADV_RANDOM);
}

MappedFileBackend::~MappedFileBackend() {
    if (map_ != nullptr) ::munmap(map_, map_len_);
}

std::span<const std::byte> MappedFileBackend::region() const {
    return {static_cast<const std::byte*>(map_) + TableFileHeader::kSize, map_len_ - TableFileHeader::kSize};
}

ModeledBackend::ModeledBackend(BackendPtr inner, FabricModel model) : inner_(std::move(inner)), model_(std::move(model)) {
    if (!inner_) throw std::invalid_argument("modeled backend needs an inner backend");
    if (inner_->kind() == BackendKind::Modeled) throw std::invalid_argument("modeled backends do not nest");
    model_.validate();
}

BackendPtr load_table(const std::filesystem::path& path, const EngramConfig& cfg, BackendKind kind,
                      const std::optional<FabricModel>& model) {
    switch (kind) {
        case BackendKind::LocalMemory: return std::make_shared<LocalMemoryBackend>(path, cfg);
        case BackendKind::MappedFile: return std::make_shared<MappedFileBackend>(path, cfg);
        case BackendKind::Modeled:
            if (!model) throw std::invalid_argument("modeled backend requires a fabric model");
            return std::make_shared<ModeledBackend>(std::make_shared<LocalMemoryBackend>(path, cfg), *model);
    }
    throw std::invalid_argument("unknown backend kind");
}

BackendPtr load_table(const EngramConfig& cfg, Fill fill, const std::optional<FabricModel>& model) {
    auto local = std::make_shared<LocalMemoryBackend>(cfg, fill);
    if (!model) return local;
    return std::make_shared<ModeledBackend>(std::move(local), *model);
}

void check_plan_bounds(const StorageBackend& backend, const GatherPlan& plan) {
    const std::uint64_t len = backend.region_len();
    for (const auto& a : plan.addresses) {
        if (a.byte_offset > len || a.length > len - a.byte_offset) {
            throw BoundsError("segment at offset " + std::to_string(a.byte_offset) + " (+" + std::to_string(a.length) +
                              ") exceeds region of " + std::to_string(len) + " bytes");
        }
    }
}

GatherReport read_segments(const StorageBackend& backend, const GatherPlan& plan,
                           std::span<std::byte> destination, unsigned workers) {
    if (workers < 1) throw std::invalid_argument("workers must be >= 1");
    check_plan_bounds(backend, plan);

    GatherReport report;
    report.messages = plan.addresses.size();
    report.bytes_moved = plan.total_bytes();
    if (destination.size() < report.bytes_moved) {
        throw std::invalid_argument("destination too small: " + std::to_string(destination.size()) + " < " +
                                    std::to_string(report.bytes_moved));
    }
    if (plan.empty()) return report;

    const std::byte* base = backend.region().data();
    std::byte* dst = destination.data();
    const auto& addrs = plan.addresses;
    const auto count = static_cast<std::int64_t>(addrs.size());

    bool uniform = true;
    for (const auto& a : addrs) uniform = uniform && a.length == addrs.front().length;
    std::vector<std::uint64_t> dst_offsets;
    if (!uniform) {
        dst_offsets.resize(addrs.size());
        std::uint64_t at = 0;
        for (std::size_t i = 0; i < addrs.size(); ++i) {
            dst_offsets[i] = at;
            at += addrs[i].length;
        }
    }
    const std::uint64_t stride = addrs.front().length;

    const auto start = std::chrono::steady_clock::now();
#pragma omp parallel for schedule(static) num_threads(workers)
    for (std::int64_t i = 0; i < count; ++i) {
        if (i + kPrefetchDistance < count) {
            const auto& next = addrs[static_cast<std::size_t>(i + kPrefetchDistance)];
            for (std::uint64_t line = 0; line < next.length; line += kCacheLine) {
                __builtin_prefetch(base + next.byte_offset + line, 0, 0);
            }
        }
        const auto& a = addrs[static_cast<std::size_t>(i)];
        const std::uint64_t out = uniform ? static_cast<std::uint64_t>(i) * stride : dst_offsets[static_cast<std::size_t>(i)];
        std::memcpy(dst + out, base + a.byte_offset, a.length);
    }
    const auto stop = std::chrono::steady_clock::now();

    report.wall_ns = static_cast<double>(std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count());
    if (const FabricModel* model = backend.fabric()) {
        report.modeled_ns = model_latency(*model, report.messages, report.bytes_moved).service_ns;
    } else {
        report.modeled_ns = report.wall_ns;
    }
    return report;
}

}  // namespace engram
