// Copyright 2026 the c2esim authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "c2e/cli.hpp"
#include "c2e/scenario.hpp"
#include "c2e/simengine.hpp"
#include "support/helpers.hpp"

using namespace c2e;
using namespace c2e::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path fresh_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("c2e_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_file(const std::string& tag, const std::string& text) {
    fs::path p = fs::temp_directory_path() / ("c2e_cli_file_" + tag);
    std::ofstream out(p, std::ios::binary);
    out << text;
    return p;
}

int run_argv(std::initializer_list<std::string> args, std::string* out_text = nullptr,
             std::string* err_text = nullptr) {
    std::vector<std::string> argv_s = {"c2e"};
    argv_s.insert(argv_s.end(), args);
    std::vector<const char*> argv;
    for (const auto& a : argv_s) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return rc;
}

}  // namespace

TEST_CASE("cmd_validate: golden scenario exits 0") {
    std::ostringstream out, err;
    CHECK(cmd_validate(c2e::testing::scenario_path("fig4_placement.json"), out, err) == kExitOk);
    CHECK(out.str() == "ok\n");
}

TEST_CASE("cmd_validate: policy violation exits 1 and names the invariant") {
    Scenario s = parse_scenario_file(c2e::testing::scenario_path("fig4_placement.json"));
    std::string text = render_scenario(s);
    auto bad = apply_scenario_overrides(text, {"policy.theta_down=0.9"});
    fs::path p = write_file("bad_theta.json", bad);
    std::ostringstream out, err;
    CHECK(cmd_validate(p.string(), out, err) == kExitDomain);
    CHECK(err.str().find("theta_down < theta_up") != std::string::npos);
}

TEST_CASE("cmd_validate: missing file exits 2") {
    std::ostringstream out, err;
    CHECK(cmd_validate("/definitely/not/here.json", out, err) == kExitUsage);
}

TEST_CASE("cmd_run writes the CSV tree and is deterministic under --override seed") {
    RunRequest req;
    req.scenario_path = c2e::testing::scenario_path("fig4_placement.json");
    req.output_dir = fresh_dir("run1");
    req.overrides = {"seed=7"};
    std::ostringstream out1, err1;
    CHECK(cmd_run(req, out1, err1) == kExitOk);
    CHECK(out1.str().find("status=ok") != std::string::npos);
    CHECK(out1.str().find("completion_time=") != std::string::npos);
    CHECK(out1.str().find("final_accuracy=") != std::string::npos);
    CHECK(out1.str().find("migrations=") != std::string::npos);
    CHECK(fs::exists(req.output_dir / "timeseries.csv"));
    CHECK(fs::exists(req.output_dir / "events.csv"));
    CHECK(fs::exists(req.output_dir / "summary.csv"));
    std::string header = slurp(req.output_dir / "timeseries.csv").substr(0, 200);
    CHECK(header.find("input_rate") != std::string::npos);
    CHECK(header.find("active_node_count") != std::string::npos);

    RunRequest req2 = req;
    req2.output_dir = fresh_dir("run2");
    std::ostringstream out2, err2;
    CHECK(cmd_run(req2, out2, err2) == kExitOk);
    for (const char* f : {"timeseries.csv", "events.csv", "summary.csv"})
        CHECK(slurp(req.output_dir / f) == slurp(req2.output_dir / f));
}

TEST_CASE("cmd_run: sensitive operators without an edge host exit 1 with partial metrics") {
    Scenario s = parse_scenario_file(c2e::testing::scenario_path("fig4_placement.json"));
    std::string text = render_scenario(s);
    // strip the dataset from both edge nodes: A has nowhere to go
    auto stripped = apply_scenario_overrides(
        text, {"cluster.nodes.1.hosted_datasets=[]", "cluster.nodes.2.hosted_datasets=[]"});
    fs::path p = write_file("nohost.json", stripped);
    RunRequest req;
    req.scenario_path = p.string();
    req.output_dir = fresh_dir("nohost");
    std::ostringstream out, err;
    CHECK(cmd_run(req, out, err) == kExitDomain);
    CHECK(err.str().find("infeasible") != std::string::npos);
    CHECK(fs::exists(req.output_dir / "summary.csv"));
    CHECK(slurp(req.output_dir / "summary.csv").find("aborted") != std::string::npos);
}

TEST_CASE("cmd_sweep: |seeds| x |override-sets| rows, per-run directories") {
    SweepRequest req;
    req.scenario_path = c2e::testing::scenario_path("fig4_placement.json");
    req.output_dir = fresh_dir("sweep1");
    req.seeds = {1, 2};
    req.override_sets = {{"policy.theta_up=0.9"}, {"policy.theta_up=0.85"}};
    req.jobs = 2;
    std::ostringstream out, err;
    CHECK(cmd_sweep(req, out, err) == kExitOk);
    std::string agg = slurp(req.output_dir / "aggregate.csv");
    CHECK(std::count(agg.begin(), agg.end(), '\n') == 5);  // header + 4 rows
    for (const char* d : {"set0_seed1", "set0_seed2", "set1_seed1", "set1_seed2"})
        CHECK(fs::exists(req.output_dir / d / "timeseries.csv"));
}

TEST_CASE("cmd_sweep: a failing row is recorded, the sweep continues, exit is 1") {
    SweepRequest req;
    req.scenario_path = c2e::testing::scenario_path("fig4_placement.json");
    req.output_dir = fresh_dir("sweep2");
    req.seeds = {5};
    req.override_sets = {{}, {"policy.theta_down=0.95"}};  // second set cannot parse
    std::ostringstream out, err;
    CHECK(cmd_sweep(req, out, err) == kExitDomain);
    std::string agg = slurp(req.output_dir / "aggregate.csv");
    CHECK(std::count(agg.begin(), agg.end(), '\n') == 3);
    CHECK(agg.find("error") != std::string::npos);
    CHECK(agg.find("ok") != std::string::npos);
}

TEST_CASE("cmd_sweep without seeds is a usage error") {
    SweepRequest req;
    req.scenario_path = c2e::testing::scenario_path("fig4_placement.json");
    req.output_dir = fresh_dir("sweep3");
    std::ostringstream out, err;
    CHECK(cmd_sweep(req, out, err) == kExitUsage);
}

TEST_CASE("cmd_config: heavy camera descriptor is headed by Darknet/YoloV5") {
    fs::path p = write_file("heavy.json", R"({
      "sample_type": {"kind": "image", "h": 480, "w": 640, "channels": 3},
      "label_type": {"kind": "bbox2d", "n_classes": 2},
      "n_samples": 60000,
      "partitions": [{"shard": "s0", "node": "e1"}]
    })");
    std::ostringstream out, err;
    CHECK(cmd_config(p.string(), false, out, err) == kExitOk);
    std::string first_line = out.str().substr(0, out.str().find('\n'));
    CHECK(first_line.find("Darknet") != std::string::npos);
    CHECK(first_line.find("YoloV5") != std::string::npos);
}

TEST_CASE("cmd_config: gps descriptor suggests the LSTM head") {
    fs::path p = write_file("gps.json", R"({
      "sample_type": {"kind": "gps_sequence", "len": 64, "features": 4},
      "label_type": {"kind": "sequence_label", "n_classes": 12},
      "n_samples": 25,
      "partitions": [{"shard": "t0", "node": "car1"}]
    })");
    std::ostringstream out, err;
    CHECK(cmd_config(p.string(), false, out, err) == kExitOk);
    CHECK(out.str().find("LSTMSequence") != std::string::npos);
}

TEST_CASE("cmd_config: malformed descriptor exits 2, unsupported combination exits 1") {
    fs::path bad = write_file("bad.json", "{nope");
    std::ostringstream out1, err1;
    CHECK(cmd_config(bad.string(), false, out1, err1) == kExitUsage);

    fs::path seg = write_file("seg.json", R"({
      "sample_type": {"kind": "image", "h": 32, "w": 32, "channels": 3},
      "label_type": {"kind": "segmentation_mask", "n_classes": 4},
      "n_samples": 100,
      "partitions": [{"shard": "s0", "node": "e1"}]
    })");
    std::ostringstream out2, err2;
    CHECK(cmd_config(seg.string(), false, out2, err2) == kExitDomain);
    CHECK(err2.str().find("segmentation_mask") != std::string::npos);
}

TEST_CASE("cmd_config --emit-app output is a runnable scenario (pipe composition)") {
    fs::path p = write_file("emit.json", R"({
      "sample_type": {"kind": "image", "h": 64, "w": 64, "channels": 3},
      "label_type": {"kind": "bbox2d", "n_classes": 1},
      "n_samples": 500,
      "sensitive_dataset": "cam",
      "partitions": [{"shard": "s0", "node": "edgeA"}, {"shard": "s1", "node": "edgeB"}]
    })");
    std::ostringstream out, err;
    REQUIRE(cmd_config(p.string(), true, out, err) == kExitOk);
    Scenario s = parse_scenario(out.str());
    auto r = simulate(s);
    CHECK_FALSE(r.aborted);
}

TEST_CASE("run_cli: exit-code contract across the argv surface") {
    std::string out, err;
    CHECK(run_argv({"validate", c2e::testing::scenario_path("fig4_placement.json")}, &out) ==
          kExitOk);
    CHECK(run_argv({"validate"}, &out, &err) == kExitUsage);      // missing argument
    CHECK(run_argv({"frobnicate", "x"}, &out, &err) == kExitUsage);
    CHECK(run_argv({"--help"}, &out, &err) == kExitOk);
    CHECK(run_argv({"run", "/nope.json", "-o", (fs::temp_directory_path() / "c2e_x").string()},
                   &out, &err) == kExitUsage);
}

TEST_CASE("cmd_sweep reproduces the failure-count curve on the 16-node golden") {
    SweepRequest req;
    req.scenario_path = c2e::testing::scenario_path("fig7a_fault_16.json");
    req.output_dir = fresh_dir("fault_sweep");
    req.seeds = {11};
    req.override_sets = {
        {"failures=[]"},
        {"failures=[[260,\"n05\"]]"},
        {"failures=[[260,\"n05\"],[260,\"n06\"]]"},
        {"failures=[[260,\"n05\"],[260,\"n06\"],[260,\"n07\"]]"},
        {"failures=[[260,\"n05\"],[260,\"n06\"],[260,\"n07\"],[260,\"n08\"]]"},
    };
    req.jobs = 4;
    std::ostringstream out, err;
    REQUIRE(cmd_sweep(req, out, err) == kExitOk);

    // each run's summary carries the completion time; the curve is monotone
    std::string agg = slurp(req.output_dir / "aggregate.csv");
    CHECK(std::count(agg.begin(), agg.end(), '\n') == 6);  // header + 5 rows
    std::vector<double> completion;
    for (int k = 0; k < 5; ++k) {
        std::string summary =
            slurp(req.output_dir / ("set" + std::to_string(k) + "_seed11") / "summary.csv");
        std::string row = summary.substr(summary.find('\n') + 1);  // "ok,<completion>,..."
        std::size_t first = row.find(','), second = row.find(',', first + 1);
        completion.push_back(std::stod(row.substr(first + 1, second - first - 1)));
    }
    REQUIRE(completion.size() == 5);
    for (std::size_t k = 1; k < completion.size(); ++k)
        CHECK(completion[k] >= completion[k - 1]);
}

TEST_CASE("run_cli sweep parses seeds and semicolon-separated override sets") {
    fs::path dir = fresh_dir("argv_sweep");
    std::string out, err;
    int rc = run_argv({"sweep", c2e::testing::scenario_path("fig4_placement.json"), "-o",
                       dir.string(), "--seeds", "3,4",
                       "--override-set", "policy.theta_up=0.9;policy.cooldown=10"},
                      &out, &err);
    CHECK(rc == kExitOk);
    std::string agg = slurp(dir / "aggregate.csv");
    CHECK(std::count(agg.begin(), agg.end(), '\n') == 3);  // header + 2 seeds x 1 set
}
