// Copyright 2026 the c2esim authors
// SPDX-License-Identifier: Apache-2.0
//
// Shared test utilities: generators, independent oracles and validators.
// Everything here is deliberately written from the contracts, not by
// calling into the implementation under test.

#ifndef C2E_TESTS_HELPERS_HPP
#define C2E_TESTS_HELPERS_HPP

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "c2e/placer.hpp"
#include "c2e/scenario.hpp"

namespace c2e::testing {

inline std::string scenario_path(const std::string& name) {
    return std::string(C2E_SCENARIO_DIR) + "/" + name;
}

// ---------------------------------------------------------------------------
// independent cycle detector (DFS three-color), used to cross-check
// validate_app's Kahn-based result
inline bool has_cycle_dfs(const TrainingApp& app) {
    std::map<std::string, int> color;  // 0 white, 1 gray, 2 black
    for (const auto& op : app.operators) color[op.id] = 0;
    bool cycle = false;
    auto visit = [&](auto&& self, const std::string& id) -> void {
        color[id] = 1;
        for (const auto& next : app.successors(id)) {
            if (!color.count(next)) continue;
            if (color[next] == 1) {
                cycle = true;
                return;
            }
            if (color[next] == 0) self(self, next);
            if (cycle) return;
        }
        color[id] = 2;
    };
    for (const auto& op : app.operators) {
        if (color[op.id] == 0) visit(visit, op.id);
        if (cycle) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// independent placement validator (acceptance criterion 1 uses this sweep)
inline std::vector<std::string> placement_violations(const Placement& p, const TrainingApp& app,
                                                     const Cluster& cluster) {
    std::vector<std::string> out;
    std::map<std::string, int> used;
    for (const auto& [inst, node_id] : p.assignment) {
        ++used[node_id];
        const NodeSpec* node = cluster.find(node_id);
        const OperatorSpec* op = app.find(inst.op);
        if (node == nullptr) {
            out.push_back("unknown node " + node_id);
            continue;
        }
        if (!node->alive || !node->active)
            out.push_back("instance on dead/inactive node " + node_id);
        if (op == nullptr) {
            out.push_back("unknown operator " + inst.op);
            continue;
        }
        if (!op->sensitivity.empty()) {
            bool allowed =
                node->tier == Tier::edge && node->hosted_datasets.count(op->sensitivity) > 0;
            if (!allowed)
                out.push_back("privacy violation: " + to_string(inst) + " on " + node_id);
        }
        auto par = p.parallelism.find(inst.op);
        if (par == p.parallelism.end() || inst.replica < 0 || inst.replica >= par->second)
            out.push_back("replica index out of range: " + to_string(inst));
    }
    for (const auto& [node_id, count] : used) {
        const NodeSpec* node = cluster.find(node_id);
        if (node != nullptr && count > node->slots) out.push_back("slots exceeded on " + node_id);
    }
    for (const auto& [op_id, par] : p.parallelism)
        for (int r = 0; r < par; ++r)
            if (!p.assignment.count({op_id, r}))
                out.push_back("missing replica " + op_id + ":" + std::to_string(r));
    return out;
}

// every placement snapshot of a finished run must be privacy-safe
inline std::vector<std::string> sweep_snapshots(
    const std::vector<std::pair<double, Placement>>& snapshots, const TrainingApp& app,
    const Cluster& original_cluster) {
    // liveness/slot checks need the cluster state at snapshot time, which the
    // report does not carry; the privacy rule is state-independent, so the
    // sweep checks it against node identity only.
    std::vector<std::string> out;
    for (const auto& [t, p] : snapshots) {
        for (const auto& [inst, node_id] : p.assignment) {
            const OperatorSpec* op = app.find(inst.op);
            const NodeSpec* node = original_cluster.find(node_id);
            if (op == nullptr || node == nullptr) {
                out.push_back("dangling snapshot entry at t=" + std::to_string(t));
                continue;
            }
            if (op->sensitivity.empty()) continue;
            if (node->tier != Tier::edge || !node->hosted_datasets.count(op->sensitivity))
                out.push_back("privacy violation at t=" + std::to_string(t) + ": " +
                              to_string(inst) + " on " + node_id);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// random generators (seeded; shared by property tests and the oracle suite)

inline TrainingApp random_app(std::mt19937_64& rng, int max_ops = 4,
                              bool with_sensitivity = true) {
    std::uniform_int_distribution<int> op_count(1, max_ops);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int n = op_count(rng);

    TrainingApp app;
    app.model_class = unit(rng) < 0.5 ? ModelClass::MLP : ModelClass::CNN;
    for (int i = 0; i < n; ++i) {
        OperatorSpec op;
        op.id = "op" + std::to_string(i);
        if (i == 0) op.kind = OpKind::source;
        else if (i == n - 1) op.kind = OpKind::sink;
        else op.kind = unit(rng) < 0.3 ? OpKind::trainer : OpKind::transform;
        if (with_sensitivity && unit(rng) < 0.3)
            op.sensitivity = unit(rng) < 0.5 ? "d1" : "d2";
        op.selectivity = 0.1 + unit(rng) * 1.5;
        op.cost_per_tuple = 0.001 + unit(rng) * 0.05;
        op.parallelism_min = 1 + (unit(rng) < 0.4 ? 1 : 0);
        op.parallelism_max = op.parallelism_min + (unit(rng) < 0.5 ? 2 : 0);
        op.state_size = unit(rng) * 10.0;
        app.operators.push_back(std::move(op));
    }
    // chain backbone keeps the graph valid; extra forward edges for variety
    for (int i = 0; i + 1 < n; ++i)
        app.edges.push_back({"op" + std::to_string(i), "op" + std::to_string(i + 1)});
    for (int i = 0; i + 2 < n; ++i)
        if (unit(rng) < 0.3)
            app.edges.push_back({"op" + std::to_string(i), "op" + std::to_string(i + 2)});
    std::sort(app.edges.begin(), app.edges.end());
    app.edges.erase(std::unique(app.edges.begin(), app.edges.end()), app.edges.end());
    return app;
}

inline Cluster random_cluster(std::mt19937_64& rng, int max_nodes = 3, int max_slots = 3) {
    std::uniform_int_distribution<int> node_count(1, max_nodes);
    std::uniform_int_distribution<int> slot_count(1, max_slots);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Cluster cluster;
    // bounded heterogeneity: keeps the greedy/oracle est ratio within 1.3x
    std::vector<double> speeds = {1.0, 1.1, 1.2, 1.3};
    cluster.profiles.clear();
    for (std::size_t i = 0; i < speeds.size(); ++i) {
        std::string name = "dev" + std::to_string(i);
        cluster.profiles[name] =
            DeviceProfile{name, {{ModelClass::MLP, speeds[i]}, {ModelClass::CNN, speeds[i]}}};
    }
    int n = node_count(rng);
    for (int i = 0; i < n; ++i) {
        NodeSpec node;
        node.id = "n" + std::to_string(i);
        node.tier = unit(rng) < 0.4 ? Tier::cloud : Tier::edge;
        node.device = "dev" + std::to_string(static_cast<int>(unit(rng) * 4) % 4);
        node.slots = slot_count(rng);
        if (node.tier == Tier::edge) {
            if (unit(rng) < 0.5) node.hosted_datasets.insert("d1");
            if (unit(rng) < 0.3) node.hosted_datasets.insert("d2");
        }
        cluster.nodes.push_back(std::move(node));
    }
    cluster.pool_max = n;
    return cluster;
}

inline Scenario random_scenario(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Scenario s;
    s.app = random_app(rng);
    s.cluster = random_cluster(rng, 4, 3);
    s.cluster.profiles = default_device_profiles();
    for (auto& n : s.cluster.nodes) n.device = unit(rng) < 0.5 ? "reference-CPU" : "Jetson-AGX";
    s.training = {{ModelClass::MLP, default_training_profile(ModelClass::MLP)},
                  {ModelClass::CNN, default_training_profile(ModelClass::CNN)}};
    double t = 0.0;
    int breaks = 1 + static_cast<int>(unit(rng) * 3);
    for (int i = 0; i < breaks; ++i) {
        s.trace.breakpoints.push_back({t, std::floor(unit(rng) * 500.0)});
        t += 1.0 + std::floor(unit(rng) * 20.0);
    }
    s.horizon = t + 10.0 + std::floor(unit(rng) * 90.0);
    std::set<std::string> failed;
    double ft = 1.0;
    for (const auto& n : s.cluster.nodes) {
        if (unit(rng) < 0.25 && failed.insert(n.id).second && ft < s.horizon - 1) {
            s.failures.events.push_back({ft, n.id});
            ft += 2.0;
        }
    }
    s.policy.theta_up = 0.6 + unit(rng) * 0.35;
    s.policy.theta_down = 0.05 + unit(rng) * 0.3;
    s.policy.cooldown = 5.0 + std::floor(unit(rng) * 30.0);
    s.policy.window = 10.0 + std::floor(unit(rng) * 50.0);
    s.policy.node_step = 1 + static_cast<int>(unit(rng) * 2);
    s.seed = static_cast<std::uint64_t>(unit(rng) * 1e6);
    s.target_accuracy = 0.9 + unit(rng) * 0.08;
    s.queue_cap = unit(rng) < 0.2 ? 1000.0 : 0.0;
    s.rate_jitter = unit(rng) * 0.15;
    return s;
}

// Spearman rank correlation with average ranks over ties
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&v](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        std::size_t i = 0;
        while (i < idx.size()) {
            std::size_t j = i;
            while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
            double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
            for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    std::vector<double> rx = ranks(x), ry = ranks(y);
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= rx.size();
    my /= ry.size();
    double num = 0, dx = 0, dy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        num += (rx[i] - mx) * (ry[i] - my);
        dx += (rx[i] - mx) * (rx[i] - mx);
        dy += (ry[i] - my) * (ry[i] - my);
    }
    if (dx == 0 || dy == 0) return 0.0;
    return num / std::sqrt(dx * dy);
}

}  // namespace c2e::testing

#endif  // C2E_TESTS_HELPERS_HPP
