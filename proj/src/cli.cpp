// Copyright 2026 the c2esim authors
// SPDX-License-Identifier: Apache-2.0

#include "c2e/cli.hpp"

#include <atomic>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "c2e/dnn_config.hpp"
#include "c2e/num_format.hpp"
#include "c2e/scenario.hpp"
#include "c2e/simengine.hpp"

namespace c2e::cli {

namespace {

std::string issue_to_line(const ParseIssue& i) {
    std::string kind;
    switch (i.kind) {
        case ParseIssue::Kind::syntax: kind = "syntax"; break;
        case ParseIssue::Kind::reference: kind = "reference"; break;
        case ParseIssue::Kind::invariant: kind = "invariant"; break;
    }
    return kind + " error at " + i.where + ": " + i.message;
}

int report_scenario_error(const ScenarioError& e, std::ostream& err) {
    for (const auto& i : e.issues()) err << issue_to_line(i) << "\n";
    return e.syntax_only() ? kExitUsage : kExitDomain;
}

std::string read_input(const std::string& path) {
    std::stringstream buf;
    if (path == "-") {
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(path);
    if (!in)
        throw ScenarioError({ParseIssue{ParseIssue::Kind::syntax, path, "cannot read file"}});
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

}  // namespace

int cmd_validate(const std::string& path, std::ostream& out, std::ostream& err) {
    try {
        parse_scenario_file(path);
    } catch (const ScenarioError& e) {
        return report_scenario_error(e, err);
    }
    out << "ok\n";
    return kExitOk;
}

int cmd_run(const RunRequest& req, std::ostream& out, std::ostream& err) {
    Scenario scenario;
    try {
        std::string text = read_input(req.scenario_path);
        if (!req.overrides.empty()) text = apply_scenario_overrides(text, req.overrides);
        scenario = parse_scenario(text);
    } catch (const ScenarioError& e) {
        return report_scenario_error(e, err);
    }

    MetricsReport report = simulate(scenario);
    try {
        export_metrics(report, req.output_dir);
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return kExitUsage;
    }
    out << "status=" << (report.aborted ? "aborted" : "ok")
        << " completion_time=" << format_shortest(report.training_completion_time)
        << " final_accuracy=" << format_shortest(report.final_accuracy)
        << " migrations=" << report.total_migrations << "\n";
    if (report.aborted) {
        err << "run aborted: " << report.abort_reason << "\n";
        return kExitDomain;
    }
    return kExitOk;
}

int cmd_sweep(const SweepRequest& req, std::ostream& out, std::ostream& err) {
    if (req.seeds.empty()) {
        err << "sweep requires at least one seed\n";
        return kExitUsage;
    }
    std::string base_text;
    try {
        base_text = read_input(req.scenario_path);
    } catch (const ScenarioError& e) {
        return report_scenario_error(e, err);
    }

    struct RunConfig {
        std::size_t set_index;
        std::uint64_t seed;
        std::vector<std::string> overrides;
        std::string dir_name;
    };
    std::vector<std::vector<std::string>> sets = req.override_sets;
    if (sets.empty()) sets.push_back({});
    std::vector<RunConfig> configs;
    for (std::size_t k = 0; k < sets.size(); ++k)
        for (std::uint64_t seed : req.seeds)
            configs.push_back({k, seed, sets[k],
                               "set" + std::to_string(k) + "_seed" + std::to_string(seed)});

    struct RowResult {
        std::string status = "ok";
        double completion = -1.0;
        double accuracy = 0.0;
        double replication = -1.0;
        long migrations = 0;
        long epochs = 0;
        bool failed = false;
    };
    std::vector<RowResult> rows(configs.size());

    auto run_one = [&](std::size_t i) {
        const RunConfig& cfg = configs[i];
        RowResult& row = rows[i];
        try {
            std::vector<std::string> overrides = cfg.overrides;
            overrides.push_back("seed=" + std::to_string(cfg.seed));
            std::string text = apply_scenario_overrides(base_text, overrides);
            Scenario scenario = parse_scenario(text);
            MetricsReport report = simulate(scenario);
            export_metrics(report, req.output_dir / cfg.dir_name);
            row.completion = report.training_completion_time;
            row.accuracy = report.final_accuracy;
            row.replication = report.replication_time;
            row.migrations = report.total_migrations;
            row.epochs = report.epochs_completed;
            if (report.aborted) {
                row.status = "aborted";
                row.failed = true;
            }
        } catch (const std::exception& e) {
            row.status = "error";
            row.failed = true;
        }
    };

    int jobs = std::max(1, req.jobs);
    if (jobs == 1) {
        for (std::size_t i = 0; i < configs.size(); ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        for (int w = 0; w < jobs; ++w)
            workers.emplace_back([&] {
                while (true) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= configs.size()) break;
                    run_one(i);
                }
            });
        for (auto& t : workers) t.join();
    }

    std::filesystem::create_directories(req.output_dir);
    std::ofstream agg(req.output_dir / "aggregate.csv", std::ios::binary);
    if (!agg) {
        err << "cannot write " << (req.output_dir / "aggregate.csv").string() << "\n";
        return kExitUsage;
    }
    agg << "run,set,seed,overrides,status,training_completion_time,final_accuracy,"
           "replication_time,total_migrations,epochs_completed\n";
    bool any_failed = false;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const RunConfig& cfg = configs[i];
        const RowResult& row = rows[i];
        any_failed |= row.failed;
        std::string joined;
        for (const auto& o : cfg.overrides) {
            if (!joined.empty()) joined += ";";
            joined += o;
        }
        if (joined.find_first_of(",\"\n") != std::string::npos) {
            std::string quoted = "\"";
            for (char c : joined) quoted += (c == '"') ? std::string("\"\"") : std::string(1, c);
            joined = quoted + "\"";
        }
        agg << cfg.dir_name << ',' << cfg.set_index << ',' << cfg.seed << ',' << joined << ','
            << row.status << ',' << format_shortest(row.completion) << ','
            << format_shortest(row.accuracy) << ',' << format_shortest(row.replication) << ','
            << row.migrations << ',' << row.epochs << "\n";
    }
    agg.close();
    out << "sweep wrote " << configs.size() << " runs to " << req.output_dir.string() << "\n";
    return any_failed ? kExitDomain : kExitOk;
}

int cmd_config(const std::string& descriptor_path, bool emit_app, std::ostream& out,
               std::ostream& err) {
    dnn::DataDescriptor descriptor;
    try {
        descriptor = dnn::parse_descriptor(read_input(descriptor_path));
    } catch (const ScenarioError& e) {
        return report_scenario_error(e, err);
    }

    std::vector<dnn::ArchSpec> suggestions;
    try {
        suggestions = dnn::suggest_architectures(descriptor);
    } catch (const dnn::UnsupportedDescriptor& e) {
        err << e.what() << "\n";
        return kExitDomain;
    }

    if (!emit_app) {
        int rank = 1;
        for (const auto& arch : suggestions) {
            out << rank++ << ". backbone=" << dnn::to_string(arch.backbone)
                << " head=" << dnn::to_string(arch.head)
                << " capacity=" << dnn::to_string(arch.capacity_class) << " input=[";
            for (std::size_t i = 0; i < arch.input_shape.size(); ++i)
                out << (i ? "," : "") << arch.input_shape[i];
            out << "] output=[";
            for (std::size_t i = 0; i < arch.output_shape.size(); ++i)
                out << (i ? "," : "") << arch.output_shape[i];
            out << "]\n";
        }
        return kExitOk;
    }

    try {
        Scenario scenario = dnn::emit_scenario(suggestions.front(), descriptor);
        out << render_scenario(scenario);
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return kExitDomain;
    }
    return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cloud2Edge elastic training simulator"};
    app.require_subcommand(1);

    std::string scenario_path, output_dir = "out", seeds_arg, descriptor_path;
    std::vector<std::string> overrides, override_sets;
    bool emit_app = false;
    int jobs = 1;

    CLI::App* validate =
        app.add_subcommand("validate", "Check a scenario file; print violations");
    validate->add_option("file", scenario_path, "scenario file")->required();

    CLI::App* run = app.add_subcommand("run", "Simulate one scenario and export CSV metrics");
    run->add_option("file", scenario_path, "scenario file ('-' reads stdin)")->required();
    run->add_option("-o,--output", output_dir, "output directory");
    run->add_option("--override", overrides, "dotted-path override, e.g. policy.theta_up=0.9");

    CLI::App* sweep = app.add_subcommand("sweep", "Run a seed x override-set grid");
    sweep->add_option("file", scenario_path, "scenario file")->required();
    sweep->add_option("-o,--output", output_dir, "output directory");
    sweep->add_option("--seeds", seeds_arg, "comma-separated seed list")->required();
    sweep->add_option("--override-set", override_sets,
                      "semicolon-separated overrides forming one run configuration");
    sweep->add_option("--jobs", jobs, "parallel runs");

    CLI::App* config =
        app.add_subcommand("config", "Suggest DNN architectures for a data descriptor");
    config->add_option("file", descriptor_path, "descriptor file ('-' reads stdin)")->required();
    config->add_flag("--emit-app", emit_app, "emit a runnable generated scenario");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return kExitUsage;
    }

    if (validate->parsed()) return cmd_validate(scenario_path, out, err);
    if (run->parsed()) {
        RunRequest req;
        req.scenario_path = scenario_path;
        req.output_dir = output_dir;
        req.overrides = overrides;
        return cmd_run(req, out, err);
    }
    if (sweep->parsed()) {
        SweepRequest req;
        req.scenario_path = scenario_path;
        req.output_dir = output_dir;
        req.jobs = jobs;
        for (const auto& s : split(seeds_arg, ',')) {
            if (s.empty()) continue;
            try {
                req.seeds.push_back(std::stoull(s));
            } catch (...) {
                err << "bad seed '" << s << "'\n";
                return kExitUsage;
            }
        }
        for (const auto& set : override_sets) {
            std::vector<std::string> parts;
            for (const auto& p : split(set, ';'))
                if (!p.empty()) parts.push_back(p);
            req.override_sets.push_back(std::move(parts));
        }
        return cmd_sweep(req, out, err);
    }
    if (config->parsed()) return cmd_config(descriptor_path, emit_app, out, err);
    err << "no subcommand\n";
    return kExitUsage;
}

}  // namespace c2e::cli
