#include "aoi_relay/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "aoi_relay/aoi_analytics.hpp"
#include "aoi_relay/aoi_simulator.hpp"
#include "aoi_relay/config_io.hpp"
#include "aoi_relay/experiments.hpp"
#include "aoi_relay/finite_blocklength.hpp"
#include "aoi_relay/oracle_suite.hpp"
#include "aoi_relay/report.hpp"

namespace aoi_relay {
namespace {

using nlohmann::json;

struct Options {
    std::string config_path;
    std::string manifest_path;
    std::map<std::string, std::string> overrides;
    std::string format;
    std::string out_path;
    std::string method = "closed_form";
    std::uint64_t seed = 1;
    int replications = 10;
    double horizon_s = 2.0e4;
    std::string mode = "fixed_eps";
    std::optional<double> eps;
    std::string trace_path;
    std::string param = "lambda_rate";
    std::string grid;
    std::string evaluator = "analytic";
    bool refine = false;
    double refine_tol = 1e-6;
};

/// Either stdout or a file, chosen by --out.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (path.empty()) return;
        file_ = std::make_unique<std::ofstream>(path);
        if (!*file_) throw std::runtime_error("cannot write '" + path + "'");
        stream_ = file_.get();
    }
    std::ostream& get() { return *stream_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
};

void add_config_options(CLI::App* sub, Options& o) {
    sub->add_option("--config", o.config_path, "key = value configuration file");
    sub->add_option("--manifest", o.manifest_path, "re-run the settings stored in a manifest");
    for (const std::string& key : config_keys()) {
        std::string dashed = key;
        for (char& c : dashed)
            if (c == '_') c = '-';
        std::string names = "--" + key;
        if (dashed != key) names += ",--" + dashed;
        sub->add_option_function<std::string>(
            names, [&o, key](const std::string& v) { o.overrides[key] = v; },
            "override " + key);
    }
    sub->add_option("--out", o.out_path, "output file (default: stdout)");
}

void add_sim_options(CLI::App* sub, Options& o) {
    sub->add_option("--seed", o.seed, "base random seed");
    sub->add_option("--replications", o.replications, "independent replications")
        ->check(CLI::PositiveNumber);
    sub->add_option("--horizon-s,--horizon_s", o.horizon_s, "simulated time per replication")
        ->check(CLI::PositiveNumber);
}

std::string parse_method(const std::string& m) {
    return to_string(error_method_from_string(m));
}

/// Resolved configuration plus the manifest it came from, if any.
struct Resolved {
    SystemConfig cfg;
    bool lambda_given = false;
    std::optional<RunManifest> manifest;
};

Resolved resolve(const Options& o) {
    Resolved r;
    if (!o.manifest_path.empty()) {
        std::ifstream in(o.manifest_path);
        if (!in) throw ConfigError("manifest", "cannot open '" + o.manifest_path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        const std::string text = buf.str();
        // Accept a bare manifest, a sidecar file, or a JSON-lines result
        // whose first line carries the manifest.
        json j = json::parse(text, nullptr, false);
        if (j.is_discarded()) j = json::parse(text.substr(0, text.find('\n')));
        if (j.contains("manifest")) j = j["manifest"];
        r.manifest = manifest_from_json(j);
        r.cfg = r.manifest->config;
        for (const auto& [k, v] : o.overrides) set_config_value(r.cfg, k, v);
        r.cfg.validate();
        r.lambda_given = true;
        return r;
    }
    ParsedConfig parsed = o.config_path.empty() ? parse_config_text("", o.overrides)
                                                : parse_config_file(o.config_path, o.overrides);
    r.cfg = parsed.config;
    r.lambda_given = parsed.lambda_given;
    return r;
}

void require_lambda(const Resolved& r, const std::string& sub) {
    if (!r.lambda_given)
        throw ConfigError("lambda_rate", "required by '" + sub + "' (set it in the config or with --lambda_rate)");
}

RunManifest base_manifest(const std::string& sub, const SystemConfig& cfg, const Options& o) {
    RunManifest m;
    m.subcommand = sub;
    m.config = cfg;
    m.seed = o.seed;
    m.replications = o.replications;
    m.horizon_s = o.horizon_s;
    m.error_method = error_method_from_string(o.method);
    m.sim_mode = sim_mode_from_string(o.mode);
    m.fixed_eps = o.eps;
    m.evaluator = evaluator_from_string(o.evaluator);
    m.timestamp = utc_timestamp();
    return m;
}

/// Manifest values win over defaults but not over flags given explicitly.
void apply_manifest(Options& o, const RunManifest& m, const CLI::App* sub) {
    auto given = [&](const char* name) {
        const CLI::Option* opt = sub->get_option_no_throw(name);
        return opt && opt->count() > 0;
    };
    if (!given("--seed")) o.seed = m.seed;
    if (!given("--replications")) o.replications = m.replications;
    if (!given("--horizon-s")) o.horizon_s = m.horizon_s;
    if (!given("--method")) o.method = to_string(m.error_method);
    if (!given("--mode")) o.mode = to_string(m.sim_mode);
    if (!given("--eps") && m.fixed_eps) o.eps = m.fixed_eps;
    if (!given("--evaluator")) o.evaluator = to_string(m.evaluator);
    if (!given("--param") && m.sweep_param) o.param = to_string(*m.sweep_param);
    if (!given("--grid") && !m.grid.empty()) {
        std::ostringstream os;
        os.precision(17);
        for (std::size_t i = 0; i < m.grid.size(); ++i) os << (i ? "," : "") << m.grid[i];
        o.grid = os.str();
    }
}

std::vector<double> parse_grid(const std::string& text, SweepParam p) {
    if (text.empty()) return default_grid(p);
    std::vector<double> g;
    if (text.find(':') != std::string::npos) {
        double lo = 0, hi = 0, step = 0;
        char c1 = 0, c2 = 0;
        std::istringstream is(text);
        if (!(is >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || !(step > 0) || hi < lo)
            throw ConfigError("grid", "expected start:stop:step, got '" + text + "'");
        const auto count = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
        for (long long i = 0; i <= count; ++i) g.push_back(lo + static_cast<double>(i) * step);
        return g;
    }
    std::istringstream is(text);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        try {
            std::size_t used = 0;
            g.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ConfigError("grid", "bad value '" + tok + "'");
        }
    }
    return g;
}

std::string fmt(double x, int digits = 12) {
    if (!std::isfinite(x)) return format_csv_number(x);
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

std::string db(double linear) { return fmt(10.0 * std::log10(linear), 6) + " dB"; }

int cmd_analyze(const Options& o, const Resolved& r, std::ostream& out, std::ostream& err) {
    require_lambda(r, "analyze");
    const ErrorMethod method = error_method_from_string(o.method);
    const AoiEstimate est = aaoi_analytic(r.cfg, method);
    const auto [sr, rd] = build_link_budgets(r.cfg);
    const RunManifest manifest = base_manifest("analyze", r.cfg, o);

    Sink sink(o.out_path, out);
    std::ostream& os = sink.get();
    if (o.format == "jsonl") {
        os << json{{"manifest", manifest_to_json(manifest)}}.dump() << '\n';
        json body = estimate_to_json(est);
        body["link_budgets"] = json::array();
        for (const LinkBudget& b : {sr, rd})
            body["link_budgets"].push_back({{"hop", to_string(b.hop)},
                                            {"alpha", b.alpha},
                                            {"avg_snr", b.avg_snr},
                                            {"n_hop", b.n_hop}});
        os << body.dump() << '\n';
    } else {
        os << "link budgets\n";
        for (const LinkBudget& b : {sr, rd})
            os << "  " << to_string(b.hop) << "  alpha=" << fmt(b.alpha) << " (" << db(b.alpha)
               << ")  avg_snr=" << fmt(b.avg_snr) << " (" << db(b.avg_snr)
               << ")  n_hop=" << fmt(b.n_hop) << '\n';
        os << "block errors (" << to_string(method) << ")\n"
           << "  eps_sr=" << fmt(est.errors.eps_sr) << "  eps_rd=" << fmt(est.errors.eps_rd)
           << "  eps_overall=" << fmt(est.errors.eps_overall) << '\n';
        os << "service\n"
           << "  attempt_duration_s=" << fmt(r.cfg.attempt_duration())
           << "  mean_s=" << fmt(est.moments.mean_s)
           << "  second_moment_s2=" << fmt(est.moments.second_moment_s)
           << "  mgf=" << fmt(est.moments.mgf_neg_lambda)
           << "  utilization=" << fmt(est.moments.utilization) << '\n';
        os << "average age of information\n"
           << "  lambda_rate=" << fmt(r.cfg.lambda_rate) << "  stable=" << (est.stable ? "true" : "false")
           << "  aaoi_s=" << fmt(est.aaoi) << '\n';
        if (est.stable)
            os << "  breakdown_s: service=" << fmt(est.breakdown[0])
               << " wait=" << fmt(est.breakdown[1]) << " interarrival=" << fmt(est.breakdown[2])
               << '\n';
    }
    if (!est.stable) {
        err << "unstable: lambda * E[s] = " << fmt(est.moments.utilization, 6)
            << " (needs < 1); largest stable rate is below "
            << fmt((1.0 - est.errors.eps_overall) / r.cfg.attempt_duration(), 6)
            << " updates/s\n";
        return kExitUnstable;
    }
    return kExitOk;
}

int cmd_simulate(const Options& o, const Resolved& r, std::ostream& out, std::ostream& err) {
    require_lambda(r, "simulate");
    SimOptions so;
    so.seed = o.seed;
    so.horizon_s = o.horizon_s;
    so.mode = sim_mode_from_string(o.mode);
    if (so.mode == SimMode::fixed_eps)
        so.fixed_eps = o.eps ? *o.eps
                             : system_error(r.cfg, error_method_from_string(o.method)).eps_overall;
    RunManifest manifest = base_manifest("simulate", r.cfg, o);
    if (so.mode == SimMode::fixed_eps) manifest.fixed_eps = so.fixed_eps;

    const ReplicationSummary reps = replicate(r.cfg, so, o.replications);
    Sink sink(o.out_path, out);
    std::ostream& os = sink.get();
    if (o.format == "jsonl") {
        os << json{{"manifest", manifest_to_json(manifest)}}.dump() << '\n';
        for (const SimResult& run : reps.runs) os << sim_result_to_json(run).dump() << '\n';
        os << json{{"summary", {{"mean_aoi_s", number_to_json(reps.mean_aoi)},
                                {"ci_halfwidth_s", number_to_json(reps.ci_halfwidth)},
                                {"no_delivery_runs", reps.no_delivery_runs}}}}
                  .dump()
           << '\n';
    } else if (o.format == "csv") {
        os << "replication,time_avg_aoi_s,time_avg_aoi_raw_s,ci_halfwidth_s,mean_delay_s,"
              "mean_wait_s,mean_attempts,delivered_count\n";
        for (const SimResult& run : reps.runs)
            os << run.replication << ',' << fmt(run.time_avg_aoi) << ','
               << fmt(run.time_avg_aoi_raw) << ',' << fmt(run.ci_halfwidth) << ','
               << fmt(run.mean_delay) << ',' << fmt(run.mean_wait) << ','
               << fmt(run.mean_attempts) << ',' << run.delivered_count << '\n';
    } else {
        os << "mode=" << to_string(so.mode);
        if (so.mode == SimMode::fixed_eps) os << " eps=" << fmt(so.fixed_eps);
        os << " horizon_s=" << fmt(so.horizon_s) << " replications=" << o.replications
           << " seed=" << o.seed << '\n';
        for (const SimResult& run : reps.runs) {
            os << "  rep " << run.replication << ": ";
            if (run.status == SimStatus::no_delivery) {
                os << "no delivery within the horizon\n";
                continue;
            }
            os << "aoi_s=" << fmt(run.time_avg_aoi) << " (raw " << fmt(run.time_avg_aoi_raw)
               << ")  delay_s=" << fmt(run.mean_delay) << "  wait_s=" << fmt(run.mean_wait)
               << "  attempts=" << fmt(run.mean_attempts) << "  delivered=" << run.delivered_count
               << '\n';
        }
        os << "mean_aoi_s=" << fmt(reps.mean_aoi) << "  ci95_halfwidth_s=" << fmt(reps.ci_halfwidth)
           << '\n';
    }
    if (!o.trace_path.empty()) {
        SimOptions traced = so;
        traced.keep_records = true;
        const SimResult run = simulate(r.cfg, traced);
        std::ofstream trace(o.trace_path);
        if (!trace) throw std::runtime_error("cannot write '" + o.trace_path + "'");
        write_trace(trace, run.records);
    }
    if (reps.no_delivery_runs) {
        err << reps.no_delivery_runs << " replication(s) delivered nothing; age is unbounded\n";
        return kExitUnstable;
    }
    return kExitOk;
}

int cmd_sweep(const Options& o, const Resolved& r, std::ostream& out, std::ostream& err) {
    SweepSpec spec;
    spec.parameter = sweep_param_from_string(o.param);
    if (spec.parameter != SweepParam::lambda_rate) require_lambda(r, "sweep --param " + o.param);
    spec.grid = parse_grid(o.grid, spec.parameter);
    spec.base = r.cfg;
    spec.evaluator = evaluator_from_string(o.evaluator);
    spec.error_method = error_method_from_string(o.method);
    spec.sim_mode = sim_mode_from_string(o.mode);
    spec.replications = o.replications;
    spec.horizon_s = o.horizon_s;
    spec.seed = o.seed;

    RunManifest manifest = base_manifest("sweep", r.cfg, o);
    manifest.sweep_param = spec.parameter;
    manifest.grid = spec.grid;

    const SweepResult result = sweep(spec);
    {
        Sink sink(o.out_path, out);
        if (o.format == "jsonl") {
            write_sweep_jsonl(sink.get(), result, manifest);
        } else {
            write_sweep_csv(sink.get(), result);
            if (!o.out_path.empty()) {
                std::ofstream side(o.out_path + ".manifest.json");
                if (!side) throw std::runtime_error("cannot write '" + o.out_path + ".manifest.json'");
                side << manifest_to_json(manifest).dump(2) << '\n';
            }
        }
    }
    if (!result.argmin) {
        err << "every grid point is unstable; no argmin\n";
    } else {
        err << "argmin " << to_string(spec.parameter) << "=" << fmt(result.argmin_value())
            << " aaoi_s=" << fmt(result.rows[*result.argmin].aaoi_analytic) << '\n';
    }
    if (o.refine) {
        const Optimum opt = find_optimum(spec, RefineOptions{-INFINITY, INFINITY, o.refine_tol});
        err << "optimum (" << to_string(opt.status) << ") " << to_string(spec.parameter) << "="
            << fmt(opt.value) << " aaoi_s=" << fmt(opt.aaoi);
        if (!opt.note.empty()) err << "  [" << opt.note << "]";
        err << '\n';
    }
    return kExitOk;
}

int cmd_validate(const Options& o, const Resolved& r, std::ostream& out, std::ostream& err) {
    require_lambda(r, "validate");
    const AoiEstimate est = aaoi_analytic(r.cfg, ErrorMethod::closed_form);
    if (!est.stable) {
        err << "unstable configuration (lambda * E[s] = " << fmt(est.moments.utilization, 6)
            << "); the oracle suite needs a stable queue\n";
        return kExitUnstable;
    }
    OracleOptions opts;
    opts.seed = o.seed;
    opts.replications = o.replications;
    opts.horizon_s = o.horizon_s;
    const std::vector<OracleCheck> checks = run_oracle_suite(r.cfg, opts);

    Sink sink(o.out_path, out);
    std::ostream& os = sink.get();
    bool ok = true;
    for (const OracleCheck& c : checks) {
        ok = ok && c.passed;
        if (o.format == "jsonl") {
            os << json{{"check", c.name},
                       {"passed", c.passed},
                       {"measured", number_to_json(c.measured)},
                       {"tolerance", number_to_json(c.tolerance)},
                       {"detail", c.detail}}
                      .dump()
               << '\n';
        } else {
            os << (c.passed ? "PASS  " : "FAIL  ") << c.name << "  |diff|=" << fmt(c.measured, 4)
               << "  tol=" << fmt(c.tolerance, 4);
            if (!c.detail.empty()) os << "  (" << c.detail << ')';
            os << '\n';
        }
    }
    return ok ? kExitOk : kExitOracleFailed;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Age of information of a two-hop decode-and-forward relay link", "aoi-relay"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    Options o;
    auto* analyze = app.add_subcommand("analyze", "closed-form block errors and average AoI");
    auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo sample paths of the age process");
    auto* sweep_cmd = app.add_subcommand("sweep", "evaluate the average AoI over a parameter grid");
    auto* validate = app.add_subcommand("validate", "run the closed-form and simulation cross-checks");

    for (CLI::App* sub : {analyze, simulate_cmd, sweep_cmd, validate}) {
        add_config_options(sub, o);
        sub->add_option("--method", o.method, "closed_form | quadrature_linearized | quadrature_exact");
    }
    analyze->add_option("--format", o.format, "text | jsonl");
    simulate_cmd->add_option("--format", o.format, "text | csv | jsonl");
    sweep_cmd->add_option("--format", o.format, "csv | jsonl");
    validate->add_option("--format", o.format, "text | jsonl");
    for (CLI::App* sub : {simulate_cmd, sweep_cmd, validate}) add_sim_options(sub, o);
    for (CLI::App* sub : {simulate_cmd, sweep_cmd}) {
        sub->add_option("--mode", o.mode, "fixed_eps | sampled_fading");
    }
    simulate_cmd->add_option("--eps", o.eps, "round failure probability for fixed_eps mode");
    simulate_cmd->add_option("--trace", o.trace_path, "write the delivery trace of replication 0");
    sweep_cmd->add_option("--param", o.param, "lambda_rate | n_total | eta_sr | phi_s | k_bits");
    sweep_cmd->add_option("--grid", o.grid, "start:stop:step or a comma list (default grid otherwise)");
    sweep_cmd->add_option("--evaluator", o.evaluator, "analytic | simulated | both");
    sweep_cmd->add_flag("--refine", o.refine, "golden-section refinement around the grid argmin");
    sweep_cmd->add_option("--refine-tol", o.refine_tol, "refinement tolerance")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        Resolved r = resolve(o);
        if (r.manifest) apply_manifest(o, *r.manifest, sub);
        parse_method(o.method);
        sim_mode_from_string(o.mode);
        if (sub == analyze) {
            if (o.format.empty()) o.format = "text";
            if (o.format != "text" && o.format != "jsonl")
                throw ConfigError("format", "expected text or jsonl");
            return cmd_analyze(o, r, out, err);
        }
        if (sub == simulate_cmd) {
            if (o.format.empty()) o.format = "text";
            if (o.format != "text" && o.format != "csv" && o.format != "jsonl")
                throw ConfigError("format", "expected text, csv or jsonl");
            if (o.eps && !(*o.eps >= 0 && *o.eps <= 1))
                throw ConfigError("eps", "must lie in [0, 1]");
            return cmd_simulate(o, r, out, err);
        }
        if (sub == sweep_cmd) {
            if (o.format.empty()) o.format = "csv";
            if (o.format != "csv" && o.format != "jsonl")
                throw ConfigError("format", "expected csv or jsonl");
            return cmd_sweep(o, r, out, err);
        }
        if (o.format.empty()) o.format = "text";
        return cmd_validate(o, r, out, err);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        err << "invalid argument: " << e.what() << '\n';
        return kExitValidation;
    } catch (const InstabilityError& e) {
        err << e.what() << '\n';
        return kExitUnstable;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace aoi_relay
