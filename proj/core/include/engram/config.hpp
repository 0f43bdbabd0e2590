#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace engram {

/// Raised when an EngramConfig violates one of its invariants. The message
/// names the violated invariant.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Geometry of one Engram embedding table plus the placement of Engram
/// modules in the host transformer.
///
/// All heads and n-gram orders address the same physical table; a head
/// selects a fixed-width slice (segment) of the hashed row.
struct EngramConfig {
    std::uint64_t num_rows = 0;
    std::uint32_t emb_dim = 0;
    std::uint32_t num_heads = 1;
    std::vector<std::uint32_t> ngram_orders;
    std::uint32_t elem_bytes = 2;
    /// 1-based layer indices, sorted ascending.
    std::vector<std::uint32_t> engram_layers;
    std::uint32_t total_layers = 1;
    std::uint64_t hash_seed = 0;

    bool operator==(const EngramConfig&) const = default;
};

/// vocab_size=2,262,400, emb_dim=1,280, 8 heads, orders {2,3}, Engram at
/// layers 2 and 15 of a 64-layer model.
EngramConfig engram_27b();

/// Same as engram_27b() with vocab_size=7,239,680.
EngramConfig engram_40b();

/// Returns cfg unchanged when every invariant holds, else throws ConfigError
/// describing the first violation.
const EngramConfig& validate_config(const EngramConfig& cfg);

std::uint64_t row_bytes(const EngramConfig& cfg);

/// Bytes in one head's slice of a row.
std::uint64_t segment_bytes(const EngramConfig& cfg);

/// Bytes fetched per token for a single Engram layer, across all orders and
/// heads.
std::uint64_t payload_bytes_per_token_layer(const EngramConfig& cfg);

/// Size of the stored row-major payload (header excluded).
std::uint64_t table_bytes(const EngramConfig& cfg);

std::uint32_t max_ngram_order(const EngramConfig& cfg);

}  // namespace engram
