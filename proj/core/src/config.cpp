#include "engram/config.hpp"

#include <algorithm>

namespace engram {

EngramConfig engram_27b() {
    EngramConfig cfg;
    cfg.num_rows = 2'262'400;
    cfg.emb_dim = 1'280;
    cfg.num_heads = 8;
    cfg.ngram_orders = {2, 3};
    cfg.elem_bytes = 2;
    cfg.engram_layers = {2, 15};
    cfg.total_layers = 64;
    cfg.hash_seed = 0x5EED'0000'E9A7'0001ULL;
    return cfg;
}

EngramConfig engram_40b() {
    EngramConfig cfg = engram_27b();
    cfg.num_rows = 7'239'680;
    return cfg;
}

const EngramConfig& validate_config(const EngramConfig& cfg) {
    if (cfg.num_rows == 0) throw ConfigError("num_rows must be positive");
    if (cfg.num_heads < 1) throw ConfigError("num_heads must be at least 1");
    if (cfg.emb_dim == 0) throw ConfigError("emb_dim must be positive");
    if (cfg.emb_dim % cfg.num_heads != 0) throw ConfigError("emb_dim not divisible by num_heads");
    for (auto order : cfg.ngram_orders) {
        if (order < 1) throw ConfigError("ngram order must be at least 1");
    }
    if (cfg.elem_bytes != 2 && cfg.elem_bytes != 4) throw ConfigError("elem_bytes must be 2 or 4");
    if (cfg.total_layers < 1) throw ConfigError("total_layers must be at least 1");
    for (auto layer : cfg.engram_layers) {
        if (layer < 1 || layer > cfg.total_layers) throw ConfigError("engram layer out of range");
    }
    if (!std::is_sorted(cfg.engram_layers.begin(), cfg.engram_layers.end()) ||
        std::adjacent_find(cfg.engram_layers.begin(), cfg.engram_layers.end()) != cfg.engram_layers.end()) {
        throw ConfigError("engram_layers must be strictly ascending");
    }
    return cfg;
}

std::uint64_t row_bytes(const EngramConfig& cfg) {
    return std::uint64_t{cfg.emb_dim} * cfg.elem_bytes;
}

std::uint64_t segment_bytes(const EngramConfig& cfg) {
    return std::uint64_t{cfg.emb_dim / cfg.num_heads} * cfg.elem_bytes;
}

std::uint64_t payload_bytes_per_token_layer(const EngramConfig& cfg) {
    return cfg.ngram_orders.size() * std::uint64_t{cfg.num_heads} * segment_bytes(cfg);
}

std::uint64_t table_bytes(const EngramConfig& cfg) {
    return cfg.num_rows * row_bytes(cfg);
}

std::uint32_t max_ngram_order(const EngramConfig& cfg) {
    if (cfg.ngram_orders.empty()) return 0;
    return *std::max_element(cfg.ngram_orders.begin(), cfg.ngram_orders.end());
}

}  // namespace engram
