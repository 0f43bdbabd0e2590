#include "engram/table_file.hpp"

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

namespace engram {
namespace {

template <typename T>
void put_le(std::byte* out, T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        out[i] = static_cast<std::byte>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF);
    }
}

template <typename T>
T get_le(const std::byte* in) {
    std::uint64_t value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        value |= std::uint64_t{std::to_integer<std::uint8_t>(in[i])} << (8 * i);
    }
    return static_cast<T>(value);
}

std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

[[noreturn]] void throw_io(const std::string& what, const std::filesystem::path& path) {
    throw std::system_error(errno ? errno : EIO, std::generic_category(), what + " " + path.string());
}

}  // namespace

TableFileHeader header_for(const EngramConfig& cfg) {
    TableFileHeader h;
    h.num_rows = cfg.num_rows;
    h.emb_dim = cfg.emb_dim;
    h.num_heads = cfg.num_heads;
    h.elem_bytes = cfg.elem_bytes;
    h.hash_seed = cfg.hash_seed;
    return h;
}

HeaderBytes encode_header(const TableFileHeader& header) {
    HeaderBytes out{};
    std::memcpy(out.data(), header.magic.data(), 4);
    put_le(out.data() + 4, header.format_version);
    put_le(out.data() + 8, header.num_rows);
    put_le(out.data() + 16, header.emb_dim);
    put_le(out.data() + 20, header.num_heads);
    put_le(out.data() + 24, header.elem_bytes);
    put_le(out.data() + 28, std::uint32_t{0});
    put_le(out.data() + 32, header.hash_seed);
    return out;
}

TableFileHeader decode_header(std::span<const std::byte> bytes) {
    if (bytes.size() < TableFileHeader::kSize) throw TableFormatError("truncated header");
    TableFileHeader h;
    std::memcpy(h.magic.data(), bytes.data(), 4);
    if (h.magic != TableFileHeader::kMagic) throw TableFormatError("bad magic");
    h.format_version = get_le<std::uint32_t>(bytes.data() + 4);
    if (h.format_version != TableFileHeader::kVersion) {
        throw TableFormatError("unsupported format version " + std::to_string(h.format_version));
    }
    h.num_rows = get_le<std::uint64_t>(bytes.data() + 8);
    h.emb_dim = get_le<std::uint32_t>(bytes.data() + 16);
    h.num_heads = get_le<std::uint32_t>(bytes.data() + 20);
    h.elem_bytes = get_le<std::uint32_t>(bytes.data() + 24);
    h.hash_seed = get_le<std::uint64_t>(bytes.data() + 32);
    return h;
}

void check_header_matches(const TableFileHeader& header, const EngramConfig& cfg) {
    auto fail = [](const char* field) {
        throw TableFormatError(std::string("config mismatch: ") + field);
    };
    if (header.num_rows != cfg.num_rows) fail("num_rows");
    if (header.emb_dim != cfg.emb_dim) fail("emb_dim");
    if (header.num_heads != cfg.num_heads) fail("num_heads");
    if (header.elem_bytes != cfg.elem_bytes) fail("elem_bytes");
    if (header.hash_seed != cfg.hash_seed) fail("hash_seed");
}

void fill_payload(std::span<std::byte> payload, Fill fill, std::uint64_t seed,
                  std::uint64_t payload_offset) {
    if (fill == Fill::Zeros) {
        std::fill(payload.begin(), payload.end(), std::byte{0});
        return;
    }
    std::size_t i = 0;
    while (i < payload.size()) {
        const std::uint64_t abs = payload_offset + i;
        const std::uint64_t word = splitmix64(seed, abs / 8);
        const std::size_t lane = abs % 8;
        const std::size_t n = std::min<std::size_t>(8 - lane, payload.size() - i);
        for (std::size_t b = 0; b < n; ++b) {
            payload[i + b] = static_cast<std::byte>((word >> (8 * (lane + b))) & 0xFF);
        }
        i += n;
    }
}

void write_table_file(const std::filesystem::path& path, const EngramConfig& cfg, Fill fill) {
    validate_config(cfg);
    errno = 0;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw_io("cannot open for writing", path);

    const auto header = encode_header(header_for(cfg));
    out.write(reinterpret_cast<const char*>(header.data()), header.size());

    constexpr std::uint64_t kChunk = 8 << 20;
    std::vector<std::byte> chunk(kChunk);
    const std::uint64_t total = table_bytes(cfg);
    for (std::uint64_t done = 0; done < total && out;) {
        const std::uint64_t n = std::min(kChunk, total - done);
        std::span<std::byte> view(chunk.data(), n);
        fill_payload(view, fill, cfg.hash_seed, done);
        out.write(reinterpret_cast<const char*>(view.data()), static_cast<std::streamsize>(n));
        done += n;
    }
    out.flush();
    if (!out) throw_io("write failed", path);
}

TableFileHeader read_table_header(const std::filesystem::path& path) {
    errno = 0;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_io("cannot open table", path);
    HeaderBytes raw{};
    in.read(reinterpret_cast<char*>(raw.data()), raw.size());
    if (in.gcount() != static_cast<std::streamsize>(raw.size())) throw TableFormatError("truncated header");
    return decode_header(raw);
}

}  // namespace engram
