// Copyright 2026 the c2esim authors
// SPDX-License-Identifier: Apache-2.0

#include "c2e/app_model.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>

namespace c2e {

std::string to_string(ModelClass mc) {
    return mc == ModelClass::MLP ? "MLP" : "CNN";
}

std::optional<ModelClass> model_class_from_string(const std::string& s) {
    if (s == "MLP") return ModelClass::MLP;
    if (s == "CNN") return ModelClass::CNN;
    return std::nullopt;
}

std::string to_string(OpKind k) {
    switch (k) {
        case OpKind::source: return "source";
        case OpKind::transform: return "transform";
        case OpKind::trainer: return "trainer";
        case OpKind::aggregator: return "aggregator";
        case OpKind::sink: return "sink";
    }
    return "transform";
}

std::optional<OpKind> op_kind_from_string(const std::string& s) {
    if (s == "source") return OpKind::source;
    if (s == "transform") return OpKind::transform;
    if (s == "trainer") return OpKind::trainer;
    if (s == "aggregator") return OpKind::aggregator;
    if (s == "sink") return OpKind::sink;
    return std::nullopt;
}

const OperatorSpec* TrainingApp::find(const std::string& id) const {
    for (const auto& op : operators)
        if (op.id == id) return &op;
    return nullptr;
}

namespace {

std::map<std::string, int> in_degree(const TrainingApp& app) {
    std::map<std::string, int> deg;
    for (const auto& op : app.operators) deg[op.id] = 0;
    for (const auto& [from, to] : app.edges) {
        auto it = deg.find(to);
        if (it != deg.end() && app.find(from) != nullptr) ++it->second;
    }
    return deg;
}

std::map<std::string, int> out_degree(const TrainingApp& app) {
    std::map<std::string, int> deg;
    for (const auto& op : app.operators) deg[op.id] = 0;
    for (const auto& [from, to] : app.edges) {
        auto it = deg.find(from);
        if (it != deg.end() && app.find(to) != nullptr) ++it->second;
    }
    return deg;
}

}  // namespace

std::vector<std::string> TrainingApp::sources() const {
    std::vector<std::string> out;
    for (const auto& [id, deg] : in_degree(*this))
        if (deg == 0) out.push_back(id);
    return out;
}

std::vector<std::string> TrainingApp::sinks() const {
    std::vector<std::string> out;
    for (const auto& [id, deg] : out_degree(*this))
        if (deg == 0) out.push_back(id);
    return out;
}

std::vector<std::string> TrainingApp::predecessors(const std::string& id) const {
    std::set<std::string> out;
    for (const auto& [from, to] : edges)
        if (to == id) out.insert(from);
    return {out.begin(), out.end()};
}

std::vector<std::string> TrainingApp::successors(const std::string& id) const {
    std::set<std::string> out;
    for (const auto& [from, to] : edges)
        if (from == id) out.insert(to);
    return {out.begin(), out.end()};
}

ValidationResult validate_app(const TrainingApp& app) {
    ValidationResult res;
    auto add = [&res](const std::string& invariant, const std::string& detail) {
        for (const auto& v : res.violations)
            if (v.invariant == invariant) return;  // each invariant listed once
        res.violations.push_back({invariant, detail});
    };

    if (app.operators.empty()) {
        add("source exists", "app has no operators");
        add("sink exists", "app has no operators");
        return res;
    }

    std::set<std::string> ids;
    for (const auto& op : app.operators) {
        if (!ids.insert(op.id).second) add("ids unique", "duplicate operator id '" + op.id + "'");
        if (op.parallelism_min < 1 || op.parallelism_min > op.parallelism_max)
            add("parallelism_min <= parallelism_max",
                "operator '" + op.id + "' has [" + std::to_string(op.parallelism_min) + ", " +
                    std::to_string(op.parallelism_max) + "]");
        if (op.selectivity < 0) add("selectivity >= 0", "operator '" + op.id + "'");
        if (!(op.cost_per_tuple > 0)) add("cost_per_tuple > 0", "operator '" + op.id + "'");
        if (op.state_size < 0) add("state_size >= 0", "operator '" + op.id + "'");
    }

    bool endpoints_ok = true;
    for (const auto& [from, to] : app.edges) {
        if (!ids.count(from) || !ids.count(to)) {
            add("edge endpoints exist",
                "edge " + from + " -> " + to + " references an undeclared operator");
            endpoints_ok = false;
        }
    }
    if (!endpoints_ok) return res;  // graph checks need a well-formed edge set

    // Kahn's algorithm; leftovers participate in a cycle.
    auto deg = in_degree(app);
    std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
    for (const auto& [id, d] : deg)
        if (d == 0) ready.push(id);
    std::size_t visited = 0;
    while (!ready.empty()) {
        auto id = ready.top();
        ready.pop();
        ++visited;
        for (const auto& next : app.successors(id))
            if (--deg[next] == 0) ready.push(next);
    }
    if (visited != app.operators.size()) add("cycle", "graph contains a cycle");

    bool has_source = false, has_sink = false;
    for (const auto& [id, d] : in_degree(app)) has_source |= (d == 0);
    for (const auto& [id, d] : out_degree(app)) has_sink |= (d == 0);
    if (!has_source) add("source exists", "no operator with in-degree 0");
    if (!has_sink) add("sink exists", "no operator with out-degree 0");

    if (has_source) {
        std::set<std::string> reachable;
        std::queue<std::string> bfs;
        for (const auto& s : app.sources()) {
            reachable.insert(s);
            bfs.push(s);
        }
        while (!bfs.empty()) {
            auto id = bfs.front();
            bfs.pop();
            for (const auto& next : app.successors(id))
                if (reachable.insert(next).second) bfs.push(next);
        }
        for (const auto& op : app.operators)
            if (!reachable.count(op.id))
                add("unreachable", "operator '" + op.id + "' is not reachable from any source");
    }
    return res;
}

std::vector<std::string> topo_order(const TrainingApp& app) {
    auto check = validate_app(app);
    if (!check.ok())
        throw std::invalid_argument("topo_order: invalid app (" + check.violations[0].invariant +
                                    ")");
    auto deg = in_degree(app);
    std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
    for (const auto& [id, d] : deg)
        if (d == 0) ready.push(id);
    std::vector<std::string> order;
    order.reserve(app.operators.size());
    while (!ready.empty()) {
        auto id = ready.top();
        ready.pop();
        order.push_back(id);
        for (const auto& next : app.successors(id))
            if (--deg[next] == 0) ready.push(next);
    }
    return order;
}

}  // namespace c2e
