#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "aoi_relay/aoi_analytics.hpp"
#include "aoi_relay/aoi_simulator.hpp"
#include "aoi_relay/experiments.hpp"
#include "aoi_relay/finite_blocklength.hpp"

namespace aoi_relay {

inline constexpr const char* kToolVersion = "0.1.0";

/// Everything needed to regenerate a result file.
struct RunManifest {
    SystemConfig config;
    std::string subcommand;
    std::uint64_t seed = 1;
    int replications = 10;
    double horizon_s = 2.0e4;
    ErrorMethod error_method = ErrorMethod::closed_form;
    SimMode sim_mode = SimMode::fixed_eps;
    std::optional<double> fixed_eps;
    std::optional<SweepParam> sweep_param;
    std::vector<double> grid;
    Evaluator evaluator = Evaluator::analytic;
    std::string tool_version = kToolVersion;
    std::string timestamp;  ///< UTC, ISO 8601; not used when re-running
};

nlohmann::json manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

/// Numbers in CSV output: 12 significant digits, `inf`/`-inf`/`nan` for non-finite.
std::string format_csv_number(double x);

/// Sweep CSV: header plus one row per grid point, columns
/// param_value,aaoi_analytic_s,aaoi_sim_s,ci_halfwidth_s,eps_overall,stable.
void write_sweep_csv(std::ostream& os, const SweepResult& result);

/// JSON-lines: a manifest line followed by one object per row. Doubles are
/// written with round-trip precision; non-finite values as the strings
/// "inf", "-inf", "nan".
void write_sweep_jsonl(std::ostream& os, const SweepResult& result, const RunManifest& manifest);

struct SweepDocument {
    RunManifest manifest;
    SweepResult result;
};

SweepDocument read_sweep_jsonl(std::istream& is);

nlohmann::json number_to_json(double x);
double number_from_json(const nlohmann::json& j);

nlohmann::json error_report_to_json(const ErrorReport& r);
nlohmann::json estimate_to_json(const AoiEstimate& e);
nlohmann::json sim_result_to_json(const SimResult& r);

}  // namespace aoi_relay
