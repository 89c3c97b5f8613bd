#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "aoi_relay/link_model.hpp"

namespace aoi_relay {

/// Config keys in their canonical spelling (unit suffix included).
const std::vector<std::string>& config_keys();

/// Sets one key from its text value. Unknown keys, malformed numbers,
/// non-integer blocklength/update sizes, and keys that name a known
/// quantity with the wrong unit suffix (e.g. `carrier_ghz`) all raise
/// ConfigError naming the key.
void set_config_value(SystemConfig& cfg, const std::string& key, const std::string& value);

struct ParsedConfig {
    SystemConfig config;
    bool lambda_given = false;
};

/// Parses `key = value` lines (`#` starts a comment), applies `overrides`
/// on top, then validates. Unspecified keys keep the defaults.
ParsedConfig parse_config_text(std::string_view text,
                               const std::map<std::string, std::string>& overrides = {});
ParsedConfig parse_config_file(const std::filesystem::path& path,
                               const std::map<std::string, std::string>& overrides = {});

/// Config-file text that parses back to exactly `cfg`.
std::string format_config(const SystemConfig& cfg);

nlohmann::json config_to_json(const SystemConfig& cfg);
SystemConfig config_from_json(const nlohmann::json& j);

}  // namespace aoi_relay
