// Copyright 2026 the c2esim authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "c2e/scenario.hpp"

namespace c2e {

using nlohmann::json;
using nlohmann::ordered_json;

double WorkloadTrace::rate_at(double t) const {
    double rate = 0.0;
    for (const auto& [bt, r] : breakpoints) {
        if (bt > t) break;
        rate = r;
    }
    return rate;
}

namespace {

std::string issue_line(const ParseIssue& i) {
    std::string kind;
    switch (i.kind) {
        case ParseIssue::Kind::syntax: kind = "syntax"; break;
        case ParseIssue::Kind::reference: kind = "reference"; break;
        case ParseIssue::Kind::invariant: kind = "invariant"; break;
    }
    return kind + " error at " + i.where + ": " + i.message;
}

std::string join_issues(const std::vector<ParseIssue>& issues) {
    std::string out = "scenario has " + std::to_string(issues.size()) + " problem(s)";
    for (const auto& i : issues) out += "\n  " + issue_line(i);
    return out;
}

[[noreturn]] void fail_syntax(const std::string& where, const std::string& message) {
    throw ScenarioError({ParseIssue{ParseIssue::Kind::syntax, where, message}});
}

const json& member(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) fail_syntax(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail_syntax(path, std::string("missing required field '") + key + "'");
    return *it;
}

double num(const json& j, const std::string& path) {
    if (!j.is_number()) fail_syntax(path, "expected a number");
    return j.get<double>();
}

double num_or(const json& j, const char* key, double fallback, const std::string& path) {
    if (!j.is_object()) fail_syntax(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    return num(*it, path + "." + key);
}

int int_at(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail_syntax(path, "expected an integer");
    return j.get<int>();
}

std::string str(const json& j, const std::string& path) {
    if (!j.is_string()) fail_syntax(path, "expected a string");
    return j.get<std::string>();
}

bool bool_or(const json& j, const char* key, bool fallback, const std::string& path) {
    if (!j.is_object()) fail_syntax(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_boolean()) fail_syntax(path + "." + key, "expected a boolean");
    return it->get<bool>();
}

std::pair<std::string, std::string> parse_edge(const std::string& s, const std::string& path) {
    auto pos = s.find("->");
    if (pos == std::string::npos) fail_syntax(path, "edge must look like 'from -> to'");
    auto trim = [](std::string v) {
        auto b = v.find_first_not_of(" \t");
        auto e = v.find_last_not_of(" \t");
        if (b == std::string::npos) return std::string();
        return v.substr(b, e - b + 1);
    };
    std::string from = trim(s.substr(0, pos));
    std::string to = trim(s.substr(pos + 2));
    if (from.empty() || to.empty()) fail_syntax(path, "edge must look like 'from -> to'");
    return {from, to};
}

TrainingApp parse_app(const json& j, std::vector<ParseIssue>& issues) {
    TrainingApp app;
    std::string mcs = str(member(j, "model_class", "app"), "app.model_class");
    auto mc = model_class_from_string(mcs);
    if (!mc) fail_syntax("app.model_class", "unknown model class '" + mcs + "'");
    app.model_class = *mc;

    const json& ops = member(j, "operators", "app");
    if (!ops.is_array()) fail_syntax("app.operators", "expected an array");
    int idx = 0;
    for (const auto& oj : ops) {
        std::string path = "app.operators[" + std::to_string(idx++) + "]";
        OperatorSpec op;
        op.id = str(member(oj, "id", path), path + ".id");
        std::string ks = str(member(oj, "kind", path), path + ".kind");
        auto kind = op_kind_from_string(ks);
        if (!kind) fail_syntax(path + ".kind", "unknown operator kind '" + ks + "'");
        op.kind = *kind;
        if (oj.contains("sensitivity")) op.sensitivity = str(oj["sensitivity"], path + ".sensitivity");
        op.selectivity = num_or(oj, "selectivity", 1.0, path);
        op.cost_per_tuple = num_or(oj, "cost_per_tuple", 1.0, path);
        op.parallelism_min =
            static_cast<int>(num_or(oj, "parallelism_min", 1.0, path));
        op.parallelism_max =
            static_cast<int>(num_or(oj, "parallelism_max", op.parallelism_min, path));
        op.state_size = num_or(oj, "state_size", 0.0, path);
        app.operators.push_back(std::move(op));
    }
    std::sort(app.operators.begin(), app.operators.end(),
              [](const OperatorSpec& a, const OperatorSpec& b) { return a.id < b.id; });

    if (j.contains("edges")) {
        const json& edges = j["edges"];
        if (!edges.is_array()) fail_syntax("app.edges", "expected an array");
        int ei = 0;
        for (const auto& e : edges) {
            std::string path = "app.edges[" + std::to_string(ei++) + "]";
            app.edges.push_back(parse_edge(str(e, path), path));
        }
        std::sort(app.edges.begin(), app.edges.end());
        app.edges.erase(std::unique(app.edges.begin(), app.edges.end()), app.edges.end());
    }

    for (const auto& [from, to] : app.edges) {
        for (const std::string& id : {from, to})
            if (app.find(id) == nullptr)
                issues.push_back({ParseIssue::Kind::reference, "app.edges",
                                  "unknown operator id '" + id + "'"});
    }
    return app;
}

Cluster parse_cluster(const json& j, ModelClass mc, std::vector<ParseIssue>& issues) {
    Cluster cluster;
    cluster.profiles = default_device_profiles();
    if (j.contains("profiles")) {
        const json& profs = j["profiles"];
        if (!profs.is_array()) fail_syntax("cluster.profiles", "expected an array");
        int pi = 0;
        for (const auto& pj : profs) {
            std::string path = "cluster.profiles[" + std::to_string(pi++) + "]";
            DeviceProfile prof;
            prof.name = str(member(pj, "name", path), path + ".name");
            const json& sp = member(pj, "speedup", path);
            if (!sp.is_object()) fail_syntax(path + ".speedup", "expected an object");
            for (const auto& [key, value] : sp.items()) {
                auto pmc = model_class_from_string(key);
                if (!pmc) fail_syntax(path + ".speedup", "unknown model class '" + key + "'");
                double v = num(value, path + ".speedup." + key);
                if (!(v > 0))
                    issues.push_back({ParseIssue::Kind::invariant, path + ".speedup." + key,
                                      "speedup > 0"});
                prof.speedup[*pmc] = v;
            }
            cluster.profiles[prof.name] = std::move(prof);
        }
    }

    const json& nodes = member(j, "nodes", "cluster");
    if (!nodes.is_array()) fail_syntax("cluster.nodes", "expected an array");
    int ni = 0;
    std::set<std::string> seen;
    for (const auto& nj : nodes) {
        std::string path = "cluster.nodes[" + std::to_string(ni++) + "]";
        NodeSpec n;
        n.id = str(member(nj, "id", path), path + ".id");
        std::string ts = str(member(nj, "tier", path), path + ".tier");
        auto tier = tier_from_string(ts);
        if (!tier) fail_syntax(path + ".tier", "unknown tier '" + ts + "'");
        n.tier = *tier;
        n.device = nj.contains("device") ? str(nj["device"], path + ".device") : "reference-CPU";
        n.slots = static_cast<int>(num_or(nj, "slots", 1.0, path));
        if (nj.contains("hosted_datasets")) {
            const json& hd = nj["hosted_datasets"];
            if (!hd.is_array()) fail_syntax(path + ".hosted_datasets", "expected an array");
            for (const auto& d : hd) n.hosted_datasets.insert(str(d, path + ".hosted_datasets"));
        }
        n.alive = bool_or(nj, "alive", true, path);
        n.active = bool_or(nj, "active", true, path);

        if (!seen.insert(n.id).second)
            issues.push_back({ParseIssue::Kind::invariant, path, "node ids unique"});
        if (n.slots < 1) issues.push_back({ParseIssue::Kind::invariant, path, "slots >= 1"});
        if (!n.hosted_datasets.empty() && n.tier != Tier::edge)
            issues.push_back(
                {ParseIssue::Kind::invariant, path, "hosted_datasets only on edge nodes"});
        if (!cluster.profiles.count(n.device))
            issues.push_back({ParseIssue::Kind::reference, path + ".device",
                              "unknown device profile '" + n.device + "'"});
        else if (!cluster.profiles.at(n.device).speedup.count(mc))
            issues.push_back({ParseIssue::Kind::invariant, path + ".device",
                              "device declares model_class speedup (" + n.device + " lacks " +
                                  to_string(mc) + ")"});
        cluster.nodes.push_back(std::move(n));
    }
    std::sort(cluster.nodes.begin(), cluster.nodes.end(),
              [](const NodeSpec& a, const NodeSpec& b) { return a.id < b.id; });

    cluster.pool_max =
        j.contains("pool_max") ? int_at(j["pool_max"], "cluster.pool_max")
                               : static_cast<int>(cluster.nodes.size());
    if (cluster.pool_max < 1)
        issues.push_back({ParseIssue::Kind::invariant, "cluster.pool_max", "pool_max >= 1"});
    if (cluster.active_count() > cluster.pool_max)
        issues.push_back(
            {ParseIssue::Kind::invariant, "cluster", "active nodes <= pool_max"});
    return cluster;
}

std::map<ModelClass, TrainingProfile> parse_training(const json& cluster_j,
                                                     std::vector<ParseIssue>& issues) {
    std::map<ModelClass, TrainingProfile> training = {
        {ModelClass::MLP, default_training_profile(ModelClass::MLP)},
        {ModelClass::CNN, default_training_profile(ModelClass::CNN)},
    };
    if (!cluster_j.contains("training")) return training;
    const json& tj = cluster_j["training"];
    if (!tj.is_array()) fail_syntax("cluster.training", "expected an array");
    int ti = 0;
    for (const auto& pj : tj) {
        std::string path = "cluster.training[" + std::to_string(ti++) + "]";
        std::string mcs = str(member(pj, "model_class", path), path + ".model_class");
        auto mc = model_class_from_string(mcs);
        if (!mc) fail_syntax(path + ".model_class", "unknown model class '" + mcs + "'");
        TrainingProfile prof = training[*mc];
        prof.model_class = *mc;
        prof.a_max = num_or(pj, "a_max", prof.a_max, path);
        prof.tau = num_or(pj, "tau", prof.tau, path);
        prof.base_epoch_time = num_or(pj, "base_epoch_time", prof.base_epoch_time, path);
        if (!(prof.a_max > 0 && prof.a_max <= 1))
            issues.push_back({ParseIssue::Kind::invariant, path, "0 < a_max <= 1"});
        if (!(prof.tau > 0)) issues.push_back({ParseIssue::Kind::invariant, path, "tau > 0"});
        if (!(prof.base_epoch_time > 0))
            issues.push_back({ParseIssue::Kind::invariant, path, "base_epoch_time > 0"});
        training[*mc] = prof;
    }
    return training;
}

}  // namespace

ScenarioError::ScenarioError(std::vector<ParseIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

bool ScenarioError::syntax_only() const {
    return std::all_of(issues_.begin(), issues_.end(),
                       [](const ParseIssue& i) { return i.kind == ParseIssue::Kind::syntax; });
}

Scenario parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail_syntax("document", e.what());  // nlohmann reports line/column
    }
    if (!doc.is_object()) fail_syntax("document", "scenario must be a JSON object");

    std::vector<ParseIssue> issues;
    Scenario s;
    s.app = parse_app(member(doc, "app", "document"), issues);
    s.cluster = parse_cluster(member(doc, "cluster", "document"), s.app.model_class, issues);
    s.training = parse_training(doc["cluster"], issues);

    const json& trace = member(doc, "trace", "document");
    if (!trace.is_array()) fail_syntax("trace", "expected an array of [t, rate] pairs");
    int bi = 0;
    for (const auto& bp : trace) {
        std::string path = "trace[" + std::to_string(bi++) + "]";
        if (!bp.is_array() || bp.size() != 2) fail_syntax(path, "expected [t, rate]");
        s.trace.breakpoints.emplace_back(num(bp[0], path), num(bp[1], path));
    }
    if (s.trace.breakpoints.empty())
        issues.push_back({ParseIssue::Kind::invariant, "trace", "trace non-empty"});
    else if (s.trace.breakpoints.front().first != 0.0)
        issues.push_back(
            {ParseIssue::Kind::invariant, "trace", "t strictly increasing starting at 0"});
    for (std::size_t i = 0; i < s.trace.breakpoints.size(); ++i) {
        if (i > 0 && !(s.trace.breakpoints[i].first > s.trace.breakpoints[i - 1].first)) {
            issues.push_back(
                {ParseIssue::Kind::invariant, "trace", "t strictly increasing starting at 0"});
            break;
        }
    }
    for (const auto& [t, r] : s.trace.breakpoints)
        if (r < 0) {
            issues.push_back({ParseIssue::Kind::invariant, "trace", "rate >= 0"});
            break;
        }

    if (doc.contains("failures")) {
        const json& fails = doc["failures"];
        if (!fails.is_array()) fail_syntax("failures", "expected an array of [t, node_id] pairs");
        int fi = 0;
        for (const auto& f : fails) {
            std::string path = "failures[" + std::to_string(fi++) + "]";
            if (!f.is_array() || f.size() != 2) fail_syntax(path, "expected [t, node_id]");
            s.failures.events.push_back({num(f[0], path), str(f[1], path)});
        }
    }
    std::set<std::string> failed_ids;
    for (std::size_t i = 0; i < s.failures.events.size(); ++i) {
        const auto& ev = s.failures.events[i];
        if (i > 0 && ev.time < s.failures.events[i - 1].time)
            issues.push_back(
                {ParseIssue::Kind::invariant, "failures", "failure times non-decreasing"});
        if (s.cluster.find(ev.node_id) == nullptr)
            issues.push_back({ParseIssue::Kind::reference, "failures",
                              "unknown node id '" + ev.node_id + "'"});
        if (!failed_ids.insert(ev.node_id).second)
            issues.push_back(
                {ParseIssue::Kind::invariant, "failures", "node failed at most once"});
    }

    if (doc.contains("policy")) {
        const json& pj = doc["policy"];
        if (!pj.is_object()) fail_syntax("policy", "expected an object");
        s.policy.theta_up = num_or(pj, "theta_up", s.policy.theta_up, "policy");
        s.policy.theta_down = num_or(pj, "theta_down", s.policy.theta_down, "policy");
        s.policy.cooldown = num_or(pj, "cooldown", s.policy.cooldown, "policy");
        s.policy.window = num_or(pj, "window", s.policy.window, "policy");
        s.policy.node_step = static_cast<int>(num_or(pj, "node_step", s.policy.node_step, "policy"));
    }
    if (!(s.policy.theta_down < s.policy.theta_up))
        issues.push_back({ParseIssue::Kind::invariant, "policy", "theta_down < theta_up"});
    if (!(s.policy.theta_up > 0 && s.policy.theta_up <= 1))
        issues.push_back({ParseIssue::Kind::invariant, "policy", "theta_up in (0, 1]"});
    if (!(s.policy.theta_down >= 0 && s.policy.theta_down < 1))
        issues.push_back({ParseIssue::Kind::invariant, "policy", "theta_down in [0, 1)"});
    if (!(s.policy.cooldown > 0))
        issues.push_back({ParseIssue::Kind::invariant, "policy", "cooldown > 0"});
    if (!(s.policy.window > 0))
        issues.push_back({ParseIssue::Kind::invariant, "policy", "window > 0"});
    if (s.policy.node_step < 1)
        issues.push_back({ParseIssue::Kind::invariant, "policy", "node_step >= 1"});

    const json& seed = member(doc, "seed", "document");
    if (!seed.is_number_integer() || seed.get<double>() < 0)
        fail_syntax("seed", "expected a non-negative integer");
    s.seed = seed.get<std::uint64_t>();
    s.horizon = num(member(doc, "horizon", "document"), "horizon");
    if (!(s.horizon > 0))
        issues.push_back({ParseIssue::Kind::invariant, "horizon", "horizon > 0"});
    for (const auto& ev : s.failures.events)
        if (ev.time >= s.horizon) {
            issues.push_back(
                {ParseIssue::Kind::invariant, "failures", "failure times < horizon"});
            break;
        }

    if (doc.contains("target_accuracy"))
        s.target_accuracy = num(doc["target_accuracy"], "target_accuracy");
    if (!(s.target_accuracy > 0 && s.target_accuracy <= 1))
        issues.push_back(
            {ParseIssue::Kind::invariant, "target_accuracy", "target_accuracy in (0, 1]"});
    if (doc.contains("queue_cap")) s.queue_cap = num(doc["queue_cap"], "queue_cap");
    if (s.queue_cap < 0)
        issues.push_back({ParseIssue::Kind::invariant, "queue_cap", "queue_cap >= 0"});
    if (doc.contains("rate_jitter")) s.rate_jitter = num(doc["rate_jitter"], "rate_jitter");
    if (!(s.rate_jitter >= 0 && s.rate_jitter < 1))
        issues.push_back({ParseIssue::Kind::invariant, "rate_jitter", "rate_jitter in [0, 1)"});

    // app-level invariants (each exactly once)
    for (const auto& v : validate_app(s.app).violations) {
        // the dedicated edge check above already names the unknown id
        if (v.invariant == "edge endpoints exist") continue;
        issues.push_back({ParseIssue::Kind::invariant, "app", v.invariant + " (" + v.detail + ")"});
    }

    if (!issues.empty()) throw ScenarioError(std::move(issues));
    return s;
}

Scenario parse_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ScenarioError({ParseIssue{ParseIssue::Kind::syntax, path.string(),
                                        "cannot read file"}});
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string render_scenario(const Scenario& s) {
    ordered_json doc;

    ordered_json app;
    app["model_class"] = to_string(s.app.model_class);
    app["operators"] = ordered_json::array();
    for (const auto& op : s.app.operators) {
        ordered_json oj;
        oj["id"] = op.id;
        oj["kind"] = to_string(op.kind);
        if (!op.sensitivity.empty()) oj["sensitivity"] = op.sensitivity;
        oj["selectivity"] = op.selectivity;
        oj["cost_per_tuple"] = op.cost_per_tuple;
        oj["parallelism_min"] = op.parallelism_min;
        oj["parallelism_max"] = op.parallelism_max;
        oj["state_size"] = op.state_size;
        app["operators"].push_back(std::move(oj));
    }
    app["edges"] = ordered_json::array();
    for (const auto& [from, to] : s.app.edges) app["edges"].push_back(from + " -> " + to);
    doc["app"] = std::move(app);

    ordered_json cluster;
    cluster["pool_max"] = s.cluster.pool_max;
    cluster["profiles"] = ordered_json::array();
    for (const auto& [name, prof] : s.cluster.profiles) {
        ordered_json pj;
        pj["name"] = name;
        ordered_json sp;
        for (const auto& [mc, v] : prof.speedup) sp[to_string(mc)] = v;
        pj["speedup"] = std::move(sp);
        cluster["profiles"].push_back(std::move(pj));
    }
    cluster["training"] = ordered_json::array();
    for (const auto& [mc, prof] : s.training) {
        ordered_json tj;
        tj["model_class"] = to_string(mc);
        tj["a_max"] = prof.a_max;
        tj["tau"] = prof.tau;
        tj["base_epoch_time"] = prof.base_epoch_time;
        cluster["training"].push_back(std::move(tj));
    }
    cluster["nodes"] = ordered_json::array();
    for (const auto& n : s.cluster.nodes) {
        ordered_json nj;
        nj["id"] = n.id;
        nj["tier"] = to_string(n.tier);
        nj["device"] = n.device;
        nj["slots"] = n.slots;
        if (!n.hosted_datasets.empty())
            nj["hosted_datasets"] = std::vector<std::string>(n.hosted_datasets.begin(),
                                                             n.hosted_datasets.end());
        if (!n.alive) nj["alive"] = false;
        if (!n.active) nj["active"] = false;
        cluster["nodes"].push_back(std::move(nj));
    }
    doc["cluster"] = std::move(cluster);

    doc["trace"] = ordered_json::array();
    for (const auto& [t, r] : s.trace.breakpoints) doc["trace"].push_back({t, r});
    doc["failures"] = ordered_json::array();
    for (const auto& ev : s.failures.events) {
        ordered_json fj = ordered_json::array();
        fj.push_back(ev.time);
        fj.push_back(ev.node_id);
        doc["failures"].push_back(std::move(fj));
    }
    doc["policy"] = {{"theta_up", s.policy.theta_up},
                     {"theta_down", s.policy.theta_down},
                     {"cooldown", s.policy.cooldown},
                     {"window", s.policy.window},
                     {"node_step", s.policy.node_step}};
    doc["seed"] = s.seed;
    doc["horizon"] = s.horizon;
    doc["target_accuracy"] = s.target_accuracy;
    doc["queue_cap"] = s.queue_cap;
    doc["rate_jitter"] = s.rate_jitter;
    return doc.dump(2) + "\n";
}

std::string apply_scenario_overrides(const std::string& text,
                                     const std::vector<std::string>& overrides) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const json::parse_error& e) {
        fail_syntax("document", e.what());
    }
    for (const auto& kv : overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
            fail_syntax("override '" + kv + "'", "expected path=value");
        std::string path = kv.substr(0, eq);
        std::string value = kv.substr(eq + 1);

        std::vector<std::string> segments;
        std::size_t start = 0;
        while (true) {
            auto dot = path.find('.', start);
            segments.push_back(path.substr(start, dot - start));
            if (dot == std::string::npos) break;
            start = dot + 1;
        }
        if (segments.empty() || segments.front().empty())
            fail_syntax("override '" + kv + "'", "empty path");

        ordered_json* cur = &doc;
        for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
            const std::string& seg = segments[i];
            if (cur->is_array()) {
                std::size_t idx = 0;
                try {
                    idx = std::stoul(seg);
                } catch (...) {
                    fail_syntax("override '" + kv + "'", "'" + seg + "' is not an array index");
                }
                if (idx >= cur->size())
                    fail_syntax("override '" + kv + "'", "index " + seg + " out of range");
                cur = &(*cur)[idx];
            } else if (cur->is_object()) {
                if (!cur->contains(seg))
                    fail_syntax("override '" + kv + "'", "path does not resolve at '" + seg + "'");
                cur = &(*cur)[seg];
            } else {
                fail_syntax("override '" + kv + "'", "path does not resolve at '" + seg + "'");
            }
        }

        ordered_json parsed;
        try {
            parsed = ordered_json::parse(value);
        } catch (...) {
            parsed = value;  // plain string
        }
        const std::string& leaf = segments.back();
        if (cur->is_array()) {
            std::size_t idx = 0;
            try {
                idx = std::stoul(leaf);
            } catch (...) {
                fail_syntax("override '" + kv + "'", "'" + leaf + "' is not an array index");
            }
            if (idx >= cur->size())
                fail_syntax("override '" + kv + "'", "index " + leaf + " out of range");
            (*cur)[idx] = std::move(parsed);
        } else if (cur->is_object()) {
            // leaf may introduce an optional field (e.g. target_accuracy)
            (*cur)[leaf] = std::move(parsed);
        } else {
            fail_syntax("override '" + kv + "'", "path does not resolve at '" + leaf + "'");
        }
    }
    return doc.dump(2) + "\n";
}

}  // namespace c2e
