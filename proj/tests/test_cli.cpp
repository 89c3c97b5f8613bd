#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "aoi_relay/cli.hpp"
#include "aoi_relay/report.hpp"

using namespace aoi_relay;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "aoi-relay");
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Run r;
    r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string line; std::getline(is, line);) out.push_back(line);
    return out;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::filesystem::path scratch(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("aoi_relay_cli_" + name);
}

}  // namespace

TEST_CASE("analyze") {
    const Run r = run({"analyze", "--lambda_rate", "22"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("stable=true") != std::string::npos);
    CHECK(r.out.find("aaoi_s=0.0890189836193") != std::string::npos);
    CHECK(r.out.find("eps_overall=3.71034623772e-09") != std::string::npos);

    SUBCASE("dashed flag spelling") {
        CHECK(run({"analyze", "--lambda-rate", "22"}).out == r.out);
    }
    SUBCASE("jsonl") {
        const Run j = run({"analyze", "--lambda_rate", "22", "--format", "jsonl"});
        REQUIRE(j.code == kExitOk);
        const auto ls = lines_of(j.out);
        REQUIRE(ls.size() == 2);
        const auto head = nlohmann::json::parse(ls[0]);
        CHECK(head["manifest"]["subcommand"] == "analyze");
        const auto body = nlohmann::json::parse(ls[1]);
        CHECK(body["aaoi_s"].get<double>() == doctest::Approx(0.089018983619324009).epsilon(1e-13));
        CHECK(body["link_budgets"].size() == 2);
    }
    SUBCASE("pure function of its inputs") {
        CHECK(run({"analyze", "--lambda_rate", "22"}).out == r.out);
    }
    SUBCASE("exact quadrature") {
        const Run q = run({"analyze", "--lambda_rate", "22", "--method", "quadrature_exact"});
        CHECK(q.code == kExitOk);
        CHECK(q.out.find("eps_overall=3.73365607706e-09") != std::string::npos);
    }
}

TEST_CASE("exit codes") {
    const Run unstable = run({"analyze", "--lambda_rate", "40"});
    CHECK(unstable.code == kExitUnstable);
    CHECK(unstable.out.find("stable=false") != std::string::npos);
    CHECK(unstable.err.find("unstable") != std::string::npos);

    const Run tau = run({"analyze", "--lambda_rate", "22", "--tau", "1.5"});
    CHECK(tau.code == kExitValidation);
    CHECK(tau.err.find("tau") != std::string::npos);

    CHECK(run({"analyze"}).code == kExitValidation);
    CHECK(run({"analyze", "--lambda_rate", "22", "--method", "magic"}).code == kExitValidation);
    CHECK(run({"analyze", "--lambda_rate", "22", "--format", "csv"}).code == kExitValidation);
    CHECK(run({"analyze", "--lambda_rate", "22", "--config", "/nonexistent/cfg"}).code == kExitValidation);
    CHECK(run({"frobnicate"}).code == kExitValidation);
    CHECK(run({}).code == kExitValidation);
    CHECK(run({"--version"}).code == kExitOk);
    CHECK(run({"validate", "--lambda_rate", "40"}).code == kExitUnstable);
    CHECK(run({"sweep", "--param", "n_total"}).code == kExitValidation);
    CHECK(run({"sweep", "--grid", "5:1:1"}).code == kExitValidation);
    CHECK(run({"sweep", "--grid", "1,x"}).code == kExitValidation);
    CHECK(run({"simulate", "--lambda_rate", "10", "--eps", "2"}).code == kExitValidation);
    CHECK(run({"analyze", "--lambda_rate", "22", "--out", "/nonexistent/dir/x"}).code == kExitFailure);
}

TEST_CASE("config file and flag precedence") {
    const auto cfg = scratch("cfg.txt");
    {
        std::ofstream f(cfg);
        f << "# test\nn_total = 300\nlambda_rate = 22\n";
    }
    const Run file = run({"analyze", "--config", cfg.string(), "--format", "jsonl"});
    REQUIRE(file.code == kExitOk);
    CHECK(nlohmann::json::parse(lines_of(file.out)[0])["manifest"]["config"]["n_total"] == 300);
    const Run flag = run({"analyze", "--config", cfg.string(), "--n_total", "100", "--format", "jsonl"});
    REQUIRE(flag.code == kExitOk);
    CHECK(nlohmann::json::parse(lines_of(flag.out)[0])["manifest"]["config"]["n_total"] == 100);
    std::filesystem::remove(cfg);
}

TEST_CASE("sweep") {
    const Run r = run({"sweep", "--param", "lambda"});
    REQUIRE(r.code == kExitOk);
    const auto ls = lines_of(r.out);
    REQUIRE(ls.size() == 34);
    CHECK(ls[0] == "param_value,aaoi_analytic_s,aaoi_sim_s,ci_halfwidth_s,eps_overall,stable");
    CHECK(r.err.find("argmin lambda_rate=21") != std::string::npos);

    SUBCASE("grid forms") {
        CHECK(lines_of(run({"sweep", "--grid", "10:30:10"}).out).size() == 4);
        CHECK(lines_of(run({"sweep", "--grid", "5,22,40"}).out).size() == 4);
        const Run unstable = run({"sweep", "--grid", "5,22,40"});
        CHECK(lines_of(unstable.out)[3].rfind("40,inf,", 0) == 0);
    }
    SUBCASE("refinement") {
        const Run ref = run({"sweep", "--refine"});
        CHECK(ref.err.find("optimum (refined) lambda_rate=20.9") != std::string::npos);
    }
    SUBCASE("csv file with manifest sidecar, re-run from the manifest") {
        const auto out = scratch("sweep.csv");
        const Run w = run({"sweep", "--param", "n", "--lambda_rate", "22", "--grid", "20:100:20",
                           "--out", out.string()});
        REQUIRE(w.code == kExitOk);
        const std::string csv = slurp(out);
        CHECK(lines_of(csv).size() == 6);
        const auto side = std::filesystem::path(out.string() + ".manifest.json");
        REQUIRE(std::filesystem::exists(side));
        const auto m = manifest_from_json(nlohmann::json::parse(slurp(side)));
        CHECK(m.sweep_param == SweepParam::n_total);
        CHECK(m.grid.size() == 5);

        const auto again = scratch("sweep2.csv");
        REQUIRE(run({"sweep", "--manifest", side.string(), "--out", again.string()}).code == kExitOk);
        CHECK(slurp(again) == csv);
        for (const auto& p : {out, side, again, std::filesystem::path(again.string() + ".manifest.json")})
            std::filesystem::remove(p);
    }
    SUBCASE("jsonl re-run from its own first line") {
        const auto out = scratch("sweep.jsonl");
        REQUIRE(run({"sweep", "--format", "jsonl", "--grid", "5,15", "--evaluator", "both",
                     "--replications", "2", "--horizon-s", "300", "--out", out.string()})
                    .code == kExitOk);
        const std::string first = slurp(out);
        const Run again = run({"sweep", "--manifest", out.string(), "--format", "jsonl"});
        REQUIRE(again.code == kExitOk);
        const auto a = lines_of(first), b = lines_of(again.out);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i] == b[i]);
        std::filesystem::remove(out);
    }
}

TEST_CASE("simulate") {
    const Run r = run({"simulate", "--lambda_rate", "10", "--horizon-s", "200", "--replications", "3",
                       "--format", "csv"});
    REQUIRE(r.code == kExitOk);
    CHECK(lines_of(r.out).size() == 4);
    CHECK(run({"simulate", "--lambda_rate", "10", "--horizon-s", "200", "--replications", "3",
               "--format", "csv"}).out == r.out);

    const Run text = run({"simulate", "--lambda_rate", "10", "--horizon-s", "200", "--eps", "0.2",
                          "--replications", "2"});
    CHECK(text.code == kExitOk);
    CHECK(text.out.find("eps=0.2") != std::string::npos);

    const Run fading = run({"simulate", "--lambda_rate", "10", "--horizon-s", "100", "--mode",
                            "sampled_fading", "--replications", "2", "--format", "jsonl"});
    CHECK(fading.code == kExitOk);
    CHECK(lines_of(fading.out).size() == 4);

    SUBCASE("trace") {
        const auto trace = scratch("trace.csv");
        REQUIRE(run({"simulate", "--lambda_rate", "10", "--horizon-s", "50", "--replications", "1",
                     "--trace", trace.string()}).code == kExitOk);
        const auto ls = lines_of(slurp(trace));
        REQUIRE(ls.size() > 100);
        CHECK(ls[0] == "gen_time,depart_time,attempts,age_after");
        std::filesystem::remove(trace);
    }
    SUBCASE("nothing delivered") {
        CHECK(run({"simulate", "--lambda_rate", "10", "--horizon-s", "5", "--eps", "1",
                   "--replications", "2"}).code == kExitUnstable);
    }
}

TEST_CASE("validate") {
    const Run r = run({"validate", "--lambda_rate", "22", "--replications", "4", "--horizon-s", "2000"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("FAIL") == std::string::npos);
    CHECK(lines_of(r.out).size() >= 6);

    const Run j = run({"validate", "--lambda_rate", "22", "--replications", "4", "--horizon-s", "2000",
                       "--format", "jsonl"});
    for (const std::string& line : lines_of(j.out)) CHECK(nlohmann::json::parse(line)["passed"] == true);
}
