#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "engram/config.hpp"
#include "engram/fabric_model.hpp"

namespace engram {

/// Flat `key = value` settings file. `#` starts a comment; lists are
/// comma-separated. Keys are ordered, so render() output is stable.
///
///   num_rows = 2262400
///   ngram_orders = 2,3
///   fabric.cxl.per_message_ns = 20
class Settings {
public:
    static Settings parse(std::istream& in);
    static Settings load(const std::filesystem::path& path);

    bool has(std::string_view key) const;
    std::optional<std::string> get(std::string_view key) const;
    void set(std::string key, std::string value);

    std::optional<std::uint64_t> get_u64(std::string_view key) const;
    std::optional<double> get_double(std::string_view key) const;
    std::optional<std::vector<std::string>> get_list(std::string_view key) const;
    std::optional<std::vector<std::uint64_t>> get_u64_list(std::string_view key) const;
    std::optional<std::vector<double>> get_double_list(std::string_view key) const;

    /// Re-parseable text; one `key = value` per line.
    std::string render() const;
    const std::map<std::string, std::string, std::less<>>& entries() const { return entries_; }

private:
    std::map<std::string, std::string, std::less<>> entries_;
};

/// Overlays settings keys onto `base` and validates the result.
EngramConfig config_from(const Settings& s, EngramConfig base = engram_27b());

/// Preset `name` with any `fabric.<name>.*` overrides applied.
FabricModel fabric_from(const Settings& s, std::string_view name);

/// `layer_exec_ns` list if present, else `step_ns` (default 3.6 ms) split
/// evenly over cfg.total_layers.
std::vector<double> layer_times_from(const Settings& s, const EngramConfig& cfg);

void store_config(Settings& s, const EngramConfig& cfg);
void store_fabric(Settings& s, const FabricModel& model);

std::string join(const std::vector<std::uint32_t>& values);
std::string join(const std::vector<std::string>& values);

}  // namespace engram
