#include "aoi_relay/config_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace aoi_relay {
namespace {

struct KeySpec {
    const char* key;
    double SystemConfig::*field;
    bool integral;
};

const KeySpec kKeys[] = {
    {"distance_m", &SystemConfig::distance_m, false},
    {"tau", &SystemConfig::tau, false},
    {"total_power_dbm", &SystemConfig::total_power_dbm, false},
    {"phi_s", &SystemConfig::phi_s, false},
    {"phi_r", &SystemConfig::phi_r, false},
    {"noise_dbm", &SystemConfig::noise_dbm, false},
    {"carrier_hz", &SystemConfig::carrier_hz, false},
    {"n_total", &SystemConfig::n_total, true},
    {"eta_sr", &SystemConfig::eta_sr, false},
    {"eta_rd", &SystemConfig::eta_rd, false},
    {"k_bits", &SystemConfig::k_bits, true},
    {"symbol_duration_s", &SystemConfig::symbol_duration_s, false},
    {"channel_delay_s", &SystemConfig::channel_delay_s, false},
    {"lambda_rate", &SystemConfig::lambda_rate, false},
};

const char* const kUnitSuffixes[] = {"_m",  "_km", "_dbm", "_dbw", "_db", "_w",  "_mw",
                                     "_hz", "_khz", "_mhz", "_ghz", "_s",  "_ms", "_us"};

const KeySpec* find_key(const std::string& key) {
    for (const KeySpec& k : kKeys)
        if (key == k.key) return &k;
    return nullptr;
}

std::string strip_suffix(const std::string& key) {
    for (const char* suffix : kUnitSuffixes) {
        const std::string s(suffix);
        if (key.size() > s.size() && key.compare(key.size() - s.size(), s.size(), s) == 0)
            return key.substr(0, key.size() - s.size());
    }
    return key;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const KeySpec& k : kKeys) out.emplace_back(k.key);
        return out;
    }();
    return keys;
}

void set_config_value(SystemConfig& cfg, const std::string& key, const std::string& value) {
    const KeySpec* spec = find_key(key);
    if (!spec) {
        const std::string stem = strip_suffix(key);
        for (const KeySpec& k : kKeys)
            if (stem != key && strip_suffix(k.key) == stem)
                throw ConfigError(key, std::string("unit suffix mismatch, expected '") + k.key + "'");
        throw ConfigError(key, "unknown key");
    }
    const std::string text = trim(value);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE || !std::isfinite(v))
        throw ConfigError(key, "not a finite number: '" + text + "'");
    if (spec->integral && v != std::floor(v))
        throw ConfigError(key, "must be an integer");
    cfg.*(spec->field) = v;
}

ParsedConfig parse_config_text(std::string_view text,
                               const std::map<std::string, std::string>& overrides) {
    ParsedConfig out;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        set_config_value(out.config, key, body.substr(eq + 1));
        if (key == "lambda_rate") out.lambda_given = true;
    }
    for (const auto& [key, value] : overrides) {
        set_config_value(out.config, key, value);
        if (key == "lambda_rate") out.lambda_given = true;
    }
    out.config.validate();
    return out;
}

ParsedConfig parse_config_file(const std::filesystem::path& path,
                               const std::map<std::string, std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), overrides);
}

std::string format_config(const SystemConfig& cfg) {
    std::string out;
    char buf[96];
    for (const KeySpec& k : kKeys) {
        std::snprintf(buf, sizeof buf, "%s = %.17g\n", k.key, cfg.*(k.field));
        out += buf;
    }
    return out;
}

nlohmann::json config_to_json(const SystemConfig& cfg) {
    nlohmann::json j = nlohmann::json::object();
    for (const KeySpec& k : kKeys) j[k.key] = cfg.*(k.field);
    return j;
}

SystemConfig config_from_json(const nlohmann::json& j) {
    SystemConfig cfg;
    for (const auto& [key, value] : j.items()) {
        const KeySpec* spec = find_key(key);
        if (!spec) throw ConfigError(key, "unknown key");
        if (!value.is_number()) throw ConfigError(key, "expected a number");
        cfg.*(spec->field) = value.get<double>();
    }
    cfg.validate();
    return cfg;
}

}  // namespace aoi_relay
