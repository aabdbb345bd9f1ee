#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rgw/cli.hpp"
#include "rgw/parallel.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kLaw = std::string(RGW_TEST_DATA) + "/uniform12.json";

struct Outcome {
    int code;
    std::string out, err;
};

Outcome run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = rgw::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Compares against tests/golden/<name>; RGW_UPDATE_GOLDEN=1 rewrites the file instead.
void check_golden(const std::string& name, const std::string& text) {
    fs::path p = fs::path(RGW_GOLDEN_DIR) / name;
    if (std::getenv("RGW_UPDATE_GOLDEN")) {
        std::ofstream(p, std::ios::binary) << text;
        return;
    }
    REQUIRE_MESSAGE(fs::exists(p), "missing golden file " << p.string());
    CHECK(slurp(p) == text);
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("rgw_cli_test_" + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("rate grid") {
    Outcome o = run({"rate", "--law", kLaw, "--q", "0.3333333333", "--grid", "0.01"});
    CHECK(o.code == 0);
    CHECK(o.out.rfind("p,rate_closed_form_available,lambda_star,upper_bound_H,neg_log_q\n", 0) == 0);
    CHECK(count_lines(o.out) == 102);
    CHECK(o.out.find(",true,") != std::string::npos);
}

TEST_CASE("golden outputs for the reference configurations") {
    check_golden("rate_uniform12_third.csv", run({"rate", "--law", kLaw, "--q", "1/3", "--grid", "0.05"}).out);
    check_golden("classify_uniform12_third.csv", run({"classify", "--law", kLaw, "--q", "1/3", "--grid", "0.05"}).out);
    check_golden("simulate_uniform12_third.csv",
                 run({"simulate", "--law", kLaw, "--q", "1/3", "--n-max", "5", "--replicas", "3", "--seed", "7"}).out);
}

TEST_CASE("verify report schema") {
    Outcome o = run({"verify", "--quick", "--seed", "42"});
    CHECK(o.code == 0);
    nlohmann::json j = nlohmann::json::parse(o.out);
    nlohmann::json schema;
    schema["keys"] = nlohmann::json::array();
    for (auto it = j.begin(); it != j.end(); ++it) schema["keys"].push_back(it.key());
    schema["check_keys"] = nlohmann::json::array();
    for (auto it = j["checks"][0].begin(); it != j["checks"][0].end(); ++it) schema["check_keys"].push_back(it.key());
    schema["checks"] = nlohmann::json::array();
    for (const auto& c : j["checks"]) {
        schema["checks"].push_back(c["name"]);
        CHECK(c["passed"].get<bool>());
    }
    check_golden("verify_quick_schema.json", schema.dump(2) + "\n");
}

TEST_CASE("simulate is deterministic across runs and thread counts") {
    std::vector<std::string> args{"simulate", "--law", kLaw, "--q", "0", "--n-max", "12", "--replicas", "100000", "--seed", "7"};
    rgw::set_default_threads(1);
    Outcome a = run(args);
    rgw::set_default_threads(4);
    Outcome b = run(args);
    CHECK(a.code == 0);
    CHECK(a.out.size() > 1000000);
    CHECK(a.out == b.out);
    auto c_args = args;
    c_args.back() = "8";
    CHECK(run(c_args).out != a.out);
}

TEST_CASE("output goes only to --out") {
    TempDir dir;
    fs::path file = dir.path / "curve.csv";
    Outcome o = run({"survival", "--law", kLaw, "--q-grid", "0.1:0.9:0.1", "--out", file.string()});
    CHECK(o.code == 0);
    CHECK(o.out.empty());
    std::string text = slurp(file);
    CHECK(text.rfind("q,C,J_min,J_baseline,survives_certified", 0) == 0);
    CHECK(count_lines(text) == 10);
    std::size_t entries = 0;
    for (auto it = fs::directory_iterator(dir.path); it != fs::directory_iterator(); ++it) ++entries;
    CHECK(entries == 1);
}

TEST_CASE("remaining subcommands run") {
    CHECK(run({"classify", "--law", kLaw, "--q", "0", "--rho", R"({"support":[1,2],"probs":[0.2,0.8]})"}).code == 0);
    CHECK(run({"urn", "--law", kLaw, "--q", "1/3", "--n", "1000", "--replicas", "5"}).code == 0);
    Outcome sp = run({"spine", "--law", kLaw, "--q", "1/3", "--rho", R"({"support":[1,2],"probs":[0.2,0.8]})", "--n", "100000"});
    CHECK(sp.code == 0);
    CHECK(sp.out.find("\n1,0.") != std::string::npos);
    Outcome tt = run({"two-type", "--law", kLaw, "--law-prime", R"({"support":[0],"probs":[1]})", "--n-max", "4"});
    CHECK(tt.code == 0);
    Outcome gb = run({"gibbs", "--law", kLaw, "--q", "1/3", "--w", "[0,1]", "--c", "0.8", "--n", "20", "--attempts", "20000", "--exact"});
    CHECK(gb.code == 0);
    CHECK(gb.out.find("exact_mean") != std::string::npos);
    Outcome ctl = run({"verify", "control", "--rho", R"({"support":[1,2],"probs":[0.2,0.8]})", "--m", "16", "--restarts", "2"});
    CHECK(ctl.code == 0);
    nlohmann::json j = nlohmann::json::parse(ctl.out);
    CHECK(j["gap_to_upper_bound"].get<double>() > 0.0);
    CHECK(j.contains("gap_to_dual"));
    CHECK(j["best_path"].get<std::string>().rfind("step,eta_1,eta_2\n", 0) == 0);
}

TEST_CASE("exit codes") {
    Outcome unknown = run({"frobnicate"});
    CHECK(unknown.code == 1);
    CHECK(unknown.err.find("Usage") != std::string::npos);
    CHECK(run({}).code == 1);
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"rate", "--law", kLaw, "--q", "1.5", "--grid", "0.1"}).code == 1);
    CHECK(run({"rate", "--law", R"({"support":[1,2],"probs":[0.5,0.6]})", "--q", "0.5", "--grid", "0.1"}).code == 1);
    CHECK(run({"rate", "--law", R"({"support":[1,2],"probs":[0.5,0.5],"bogus":0})", "--q", "0.5", "--grid", "0.1"}).code == 1);
    CHECK(run({"rate", "--law", kLaw, "--q", "0.5", "--grid", "0.3"}).code == 1);
    CHECK(run({"gibbs", "--law", kLaw, "--q", "1/3", "--w", "[0,1]", "--c", "0.99", "--n", "200", "--attempts", "100"}).code == 2);
}
