#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>

#include "engram/config.hpp"

namespace engram {

class TableFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// On-disk layout (little-endian, 40 bytes):
//   0  magic "ENGT"
//   4  u32 format_version
//   8  u64 num_rows
//  16  u32 emb_dim
//  20  u32 num_heads
//  24  u32 elem_bytes
//  28  u32 reserved (zero)
//  32  u64 hash_seed
//  40  payload, row-major
struct TableFileHeader {
    static constexpr std::size_t kSize = 40;
    static constexpr std::uint32_t kVersion = 1;
    static constexpr std::array<char, 4> kMagic{'E', 'N', 'G', 'T'};

    std::array<char, 4> magic = kMagic;
    std::uint32_t format_version = kVersion;
    std::uint64_t num_rows = 0;
    std::uint32_t emb_dim = 0;
    std::uint32_t num_heads = 0;
    std::uint32_t elem_bytes = 0;
    std::uint64_t hash_seed = 0;

    bool operator==(const TableFileHeader&) const = default;
};

using HeaderBytes = std::array<std::byte, TableFileHeader::kSize>;

TableFileHeader header_for(const EngramConfig& cfg);
HeaderBytes encode_header(const TableFileHeader& header);

/// Parses and checks magic and version. Throws TableFormatError.
TableFileHeader decode_header(std::span<const std::byte> bytes);

/// Throws TableFormatError("config mismatch: <field>") on the first field
/// that differs.
void check_header_matches(const TableFileHeader& header, const EngramConfig& cfg);

enum class Fill { Zeros, SeededRandom };

/// Fills a payload buffer. SeededRandom output depends only on (seed, byte
/// index), so any chunking of the payload produces the same bytes.
void fill_payload(std::span<std::byte> payload, Fill fill, std::uint64_t seed,
                  std::uint64_t payload_offset = 0);

/// Writes header + payload. Throws std::system_error on I/O failure.
void write_table_file(const std::filesystem::path& path, const EngramConfig& cfg, Fill fill);

TableFileHeader read_table_header(const std::filesystem::path& path);

}  // namespace engram
