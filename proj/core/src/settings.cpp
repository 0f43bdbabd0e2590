#include "engram/settings.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace engram {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
    std::vector<std::string_view> out;
    while (true) {
        const auto comma = s.find(',');
        const auto item = trim(s.substr(0, comma));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    T value{};
    // accept hex for integers (seeds are commonly written that way)
    int base = 10;
    if constexpr (std::is_integral_v<T>) {
        if (text.starts_with("0x") || text.starts_with("0X")) {
            text.remove_prefix(2);
            base = 16;
        }
        auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value, base);
        if (ec != std::errc{} || p != text.data() + text.size()) {
            throw ConfigError("setting '" + std::string(key) + "': not an integer: " + std::string(text));
        }
    } else {
        auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{} || p != text.data() + text.size()) {
            throw ConfigError("setting '" + std::string(key) + "': not a number: " + std::string(text));
        }
    }
    return value;
}

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

std::uint32_t narrow32(std::string_view key, std::uint64_t v) {
    if (v > 0xFFFFFFFFULL) throw ConfigError("setting '" + std::string(key) + "' out of range");
    return static_cast<std::uint32_t>(v);
}

std::vector<std::uint32_t> narrow32(std::string_view key, const std::vector<std::uint64_t>& vs) {
    std::vector<std::uint32_t> out;
    out.reserve(vs.size());
    for (auto v : vs) out.push_back(narrow32(key, v));
    return out;
}

}  // namespace

Settings Settings::parse(std::istream& in) {
    Settings s;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        const auto key = trim(view.substr(0, eq));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        s.set(std::string(key), std::string(trim(view.substr(eq + 1))));
    }
    return s;
}

Settings Settings::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::system_error(errno, std::generic_category(), "cannot open config " + path.string());
    return parse(in);
}

bool Settings::has(std::string_view key) const { return entries_.find(key) != entries_.end(); }

std::optional<std::string> Settings::get(std::string_view key) const {
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
    return std::nullopt;
}

void Settings::set(std::string key, std::string value) { entries_[std::move(key)] = std::move(value); }

std::optional<std::uint64_t> Settings::get_u64(std::string_view key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    return parse_number<std::uint64_t>(key, *v);
}

std::optional<double> Settings::get_double(std::string_view key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    return parse_number<double>(key, *v);
}

std::optional<std::vector<std::string>> Settings::get_list(std::string_view key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    std::vector<std::string> out;
    for (auto item : split_list(*v)) out.emplace_back(item);
    return out;
}

std::optional<std::vector<std::uint64_t>> Settings::get_u64_list(std::string_view key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    std::vector<std::uint64_t> out;
    for (auto item : split_list(*v)) out.push_back(parse_number<std::uint64_t>(key, item));
    return out;
}

std::optional<std::vector<double>> Settings::get_double_list(std::string_view key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    std::vector<double> out;
    for (auto item : split_list(*v)) out.push_back(parse_number<double>(key, item));
    return out;
}

std::string Settings::render() const {
    std::ostringstream out;
    for (const auto& [k, v] : entries_) out << k << " = " << v << '\n';
    return out.str();
}

EngramConfig config_from(const Settings& s, EngramConfig base) {
    if (auto v = s.get_u64("num_rows")) base.num_rows = *v;
    if (auto v = s.get_u64("emb_dim")) base.emb_dim = narrow32("emb_dim", *v);
    if (auto v = s.get_u64("num_heads")) base.num_heads = narrow32("num_heads", *v);
    if (auto v = s.get_u64_list("ngram_orders")) base.ngram_orders = narrow32("ngram_orders", *v);
    if (auto v = s.get_u64("elem_bytes")) base.elem_bytes = narrow32("elem_bytes", *v);
    if (auto v = s.get_u64_list("engram_layers")) base.engram_layers = narrow32("engram_layers", *v);
    if (auto v = s.get_u64("total_layers")) base.total_layers = narrow32("total_layers", *v);
    if (auto v = s.get_u64("hash_seed")) base.hash_seed = *v;
    validate_config(base);
    return base;
}

FabricModel fabric_from(const Settings& s, std::string_view name) {
    FabricModel m = fabric_preset(name);
    const std::string prefix = "fabric." + std::string(name) + ".";
    if (auto v = s.get_double(prefix + "base_latency_ns")) m.base_latency_ns = *v;
    if (auto v = s.get_double(prefix + "per_message_ns")) m.per_message_ns = *v;
    if (auto v = s.get_double(prefix + "per_byte_ns")) m.per_byte_ns = *v;
    if (auto v = s.get_u64(prefix + "max_inflight")) m.max_inflight = narrow32("max_inflight", *v);
    m.validate();
    return m;
}

std::vector<double> layer_times_from(const Settings& s, const EngramConfig& cfg) {
    if (auto v = s.get_double_list("layer_exec_ns")) {
        if (v->size() != cfg.total_layers) {
            throw ConfigError("layer_exec_ns has " + std::to_string(v->size()) + " entries, total_layers is " +
                              std::to_string(cfg.total_layers));
        }
        return *v;
    }
    const double step = s.get_double("step_ns").value_or(3'600'000.0);
    if (step <= 0) throw ConfigError("step_ns must be positive");
    return std::vector<double>(cfg.total_layers, step / cfg.total_layers);
}

std::string join(const std::vector<std::uint32_t>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(values[i]);
    }
    return out;
}

std::string join(const std::vector<std::string>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += values[i];
    }
    return out;
}

void store_config(Settings& s, const EngramConfig& cfg) {
    s.set("num_rows", std::to_string(cfg.num_rows));
    s.set("emb_dim", std::to_string(cfg.emb_dim));
    s.set("num_heads", std::to_string(cfg.num_heads));
    s.set("ngram_orders", join(cfg.ngram_orders));
    s.set("elem_bytes", std::to_string(cfg.elem_bytes));
    s.set("engram_layers", join(cfg.engram_layers));
    s.set("total_layers", std::to_string(cfg.total_layers));
    s.set("hash_seed", std::to_string(cfg.hash_seed));
}

void store_fabric(Settings& s, const FabricModel& m) {
    const std::string prefix = "fabric." + m.name + ".";
    s.set(prefix + "base_latency_ns", format_double(m.base_latency_ns));
    s.set(prefix + "per_message_ns", format_double(m.per_message_ns));
    s.set(prefix + "per_byte_ns", format_double(m.per_byte_ns));
    s.set(prefix + "max_inflight", std::to_string(m.max_inflight));
}

}  // namespace engram
