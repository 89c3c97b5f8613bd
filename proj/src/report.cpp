#include "aoi_relay/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <istream>
#include <limits>
#include <ostream>

#include "aoi_relay/config_io.hpp"

namespace aoi_relay {

using nlohmann::json;

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json number_to_json(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

double number_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw std::invalid_argument("expected a number, got " + j.dump());
}

json manifest_to_json(const RunManifest& m) {
    json j;
    j["config"] = config_to_json(m.config);
    j["subcommand"] = m.subcommand;
    j["seed"] = m.seed;
    j["replications"] = m.replications;
    j["horizon_s"] = m.horizon_s;
    j["error_method"] = to_string(m.error_method);
    j["sim_mode"] = to_string(m.sim_mode);
    j["fixed_eps"] = m.fixed_eps ? json(*m.fixed_eps) : json(nullptr);
    j["sweep_param"] = m.sweep_param ? json(to_string(*m.sweep_param)) : json(nullptr);
    j["grid"] = m.grid;
    j["evaluator"] = to_string(m.evaluator);
    j["tool_version"] = m.tool_version;
    j["timestamp"] = m.timestamp;
    return j;
}

RunManifest manifest_from_json(const json& j) {
    RunManifest m;
    m.config = config_from_json(j.at("config"));
    m.subcommand = j.at("subcommand").get<std::string>();
    m.seed = j.value("seed", std::uint64_t{1});
    m.replications = j.value("replications", 10);
    m.horizon_s = j.value("horizon_s", 2.0e4);
    m.error_method = error_method_from_string(j.value("error_method", std::string("closed_form")));
    m.sim_mode = sim_mode_from_string(j.value("sim_mode", std::string("fixed_eps")));
    if (j.contains("fixed_eps") && !j["fixed_eps"].is_null()) m.fixed_eps = j["fixed_eps"].get<double>();
    if (j.contains("sweep_param") && !j["sweep_param"].is_null())
        m.sweep_param = sweep_param_from_string(j["sweep_param"].get<std::string>());
    if (j.contains("grid")) m.grid = j["grid"].get<std::vector<double>>();
    m.evaluator = evaluator_from_string(j.value("evaluator", std::string("analytic")));
    m.tool_version = j.value("tool_version", std::string(kToolVersion));
    m.timestamp = j.value("timestamp", std::string());
    return m;
}

std::string format_csv_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
    os << "param_value,aaoi_analytic_s,aaoi_sim_s,ci_halfwidth_s,eps_overall,stable\n";
    for (const SweepRow& r : result.rows) {
        os << format_csv_number(r.value) << ','
           << format_csv_number(r.stable ? r.aaoi_analytic
                                         : std::numeric_limits<double>::infinity())
           << ',' << format_csv_number(r.aaoi_sim) << ',' << format_csv_number(r.ci_halfwidth)
           << ',' << format_csv_number(r.eps_overall) << ',' << (r.stable ? "true" : "false")
           << '\n';
    }
}

void write_sweep_jsonl(std::ostream& os, const SweepResult& result, const RunManifest& manifest) {
    json head;
    head["manifest"] = manifest_to_json(manifest);
    head["parameter"] = to_string(result.parameter);
    head["argmin_index"] = result.argmin ? json(*result.argmin) : json(nullptr);
    os << head.dump() << '\n';
    for (const SweepRow& r : result.rows) {
        json row;
        row["param_value"] = number_to_json(r.value);
        row["aaoi_analytic_s"] = number_to_json(r.aaoi_analytic);
        row["aaoi_sim_s"] = number_to_json(r.aaoi_sim);
        row["ci_halfwidth_s"] = number_to_json(r.ci_halfwidth);
        row["eps_overall"] = number_to_json(r.eps_overall);
        row["stable"] = r.stable;
        os << row.dump() << '\n';
    }
}

SweepDocument read_sweep_jsonl(std::istream& is) {
    SweepDocument doc;
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("read_sweep_jsonl: empty input");
    const json head = json::parse(line);
    doc.manifest = manifest_from_json(head.at("manifest"));
    doc.result.parameter = sweep_param_from_string(head.at("parameter").get<std::string>());
    if (!head.at("argmin_index").is_null())
        doc.result.argmin = head["argmin_index"].get<std::size_t>();
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        SweepRow r;
        r.value = number_from_json(j.at("param_value"));
        r.aaoi_analytic = number_from_json(j.at("aaoi_analytic_s"));
        r.aaoi_sim = number_from_json(j.at("aaoi_sim_s"));
        r.ci_halfwidth = number_from_json(j.at("ci_halfwidth_s"));
        r.eps_overall = number_from_json(j.at("eps_overall"));
        r.stable = j.at("stable").get<bool>();
        doc.result.rows.push_back(r);
    }
    return doc;
}

json error_report_to_json(const ErrorReport& r) {
    return {{"eps_sr", number_to_json(r.eps_sr)},
            {"eps_rd", number_to_json(r.eps_rd)},
            {"eps_overall", number_to_json(r.eps_overall)},
            {"method", to_string(r.method)}};
}

json estimate_to_json(const AoiEstimate& e) {
    json j;
    j["aaoi_s"] = number_to_json(e.aaoi);
    j["stable"] = e.stable;
    j["source"] = e.source == EstimateSource::analytic ? "analytic" : "simulated";
    j["breakdown_s"] = {number_to_json(e.breakdown[0]), number_to_json(e.breakdown[1]),
                        number_to_json(e.breakdown[2])};
    j["mean_service_s"] = number_to_json(e.moments.mean_s);
    j["second_moment_service_s2"] = number_to_json(e.moments.second_moment_s);
    j["mgf_neg_lambda"] = number_to_json(e.moments.mgf_neg_lambda);
    j["utilization"] = number_to_json(e.moments.utilization);
    j["errors"] = error_report_to_json(e.errors);
    return j;
}

json sim_result_to_json(const SimResult& r) {
    json j;
    j["status"] = r.status == SimStatus::ok ? "ok" : "no_delivery";
    j["time_avg_aoi_s"] = number_to_json(r.time_avg_aoi);
    j["time_avg_aoi_raw_s"] = number_to_json(r.time_avg_aoi_raw);
    j["ci_halfwidth_s"] = number_to_json(r.ci_halfwidth);
    j["mean_delay_s"] = number_to_json(r.mean_delay);
    j["mean_wait_s"] = number_to_json(r.mean_wait);
    j["mean_service_s"] = number_to_json(r.mean_service);
    j["mean_attempts"] = number_to_json(r.mean_attempts);
    j["delivered_count"] = r.delivered_count;
    j["rounds"] = r.rounds;
    j["failed_rounds"] = r.failed_rounds;
    j["horizon_s"] = r.horizon;
    j["seed"] = r.seed;
    j["replication"] = r.replication;
    j["n_sr_used"] = r.n_sr_used;
    j["n_rd_used"] = r.n_rd_used;
    return j;
}

}  // namespace aoi_relay
