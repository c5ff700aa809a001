// Copyright 2026 the c2esim authors
// SPDX-License-Identifier: Apache-2.0

#include "c2e/placer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace c2e {

std::string to_string(const InstanceId& id) {
    return id.op + ":" + std::to_string(id.replica);
}

std::vector<InstanceId> Placement::instances_on(const std::string& node_id) const {
    std::vector<InstanceId> out;
    for (const auto& [inst, node] : assignment)
        if (node == node_id) out.push_back(inst);
    return out;
}

std::map<std::string, int> Placement::used_slots() const {
    std::map<std::string, int> used;
    for (const auto& [inst, node] : assignment) ++used[node];
    return used;
}

std::set<std::string> feasible_nodes(const OperatorSpec& op, const Cluster& cluster) {
    std::set<std::string> out;
    for (const auto& n : cluster.nodes) {
        if (!n.usable()) continue;
        if (!op.sensitivity.empty()) {
            if (n.tier != Tier::edge || !n.hosted_datasets.count(op.sensitivity)) continue;
        }
        out.insert(n.id);
    }
    return out;
}

namespace {

struct SlotTracker {
    std::map<std::string, int> free;  // usable node -> free slots

    explicit SlotTracker(const Cluster& cluster, const Placement& current) {
        for (const auto& n : cluster.nodes)
            if (n.usable()) free[n.id] = n.slots;
        for (const auto& [inst, node] : current.assignment) {
            auto it = free.find(node);
            if (it != free.end()) --it->second;
        }
    }

    // most free slots, ties lexicographic
    const std::string* pick(const std::set<std::string>& candidates) const {
        const std::string* best = nullptr;
        int best_free = 0;
        for (const auto& id : candidates) {
            auto it = free.find(id);
            if (it == free.end() || it->second <= 0) continue;
            if (best == nullptr || it->second > best_free) {
                best = &id;
                best_free = it->second;
            }
        }
        return best;
    }

    void take(const std::string& node) { --free[node]; }
};

// (|feasible set| ascending, id)
std::vector<const OperatorSpec*> greedy_op_order(const TrainingApp& app, const Cluster& cluster) {
    std::vector<std::pair<std::size_t, const OperatorSpec*>> keyed;
    for (const auto& op : app.operators)
        keyed.emplace_back(feasible_nodes(op, cluster).size(), &op);
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second->id < b.second->id;
    });
    std::vector<const OperatorSpec*> out;
    for (const auto& [k, op] : keyed) out.push_back(op);
    return out;
}

}  // namespace

PlaceResult place(const TrainingApp& app, const Cluster& cluster) {
    auto check = validate_app(app);
    if (!check.ok())
        throw std::invalid_argument("place: invalid app (" + check.violations[0].invariant + ")");

    Placement p;
    for (const auto& op : app.operators) p.parallelism[op.id] = op.parallelism_min;

    SlotTracker slots(cluster, p);  // p has no assignments yet
    for (const OperatorSpec* op : greedy_op_order(app, cluster)) {
        auto feas = feasible_nodes(*op, cluster);
        for (int r = 0; r < op->parallelism_min; ++r) {
            const std::string* node = slots.pick(feas);
            if (node == nullptr)
                return InfeasibleReport{op->id,
                                        feas.empty()
                                            ? "no feasible node for operator '" + op->id + "'"
                                            : "no free slot on feasible nodes for operator '" +
                                                  op->id + "'",
                                        feas.empty()};
            p.assignment[{op->id, r}] = *node;
            slots.take(*node);
        }
    }
    return p;
}

PlaceResult rebalance(const Placement& current, const TrainingApp& app, const Cluster& cluster,
                      const std::vector<InstanceId>& evicted) {
    Placement p = current;
    for (const auto& inst : evicted) p.assignment.erase(inst);

    // same greedy rule as place(): scarce operators first
    std::vector<InstanceId> order = evicted;
    std::map<std::string, std::size_t> feas_size;
    for (const auto& inst : order)
        if (!feas_size.count(inst.op)) {
            const OperatorSpec* op = app.find(inst.op);
            if (op == nullptr)
                throw std::invalid_argument("rebalance: unknown operator '" + inst.op + "'");
            feas_size[inst.op] = feasible_nodes(*op, cluster).size();
        }
    std::sort(order.begin(), order.end(), [&feas_size](const InstanceId& a, const InstanceId& b) {
        auto fa = feas_size[a.op], fb = feas_size[b.op];
        if (fa != fb) return fa < fb;
        return a < b;
    });

    SlotTracker slots(cluster, p);
    for (const auto& inst : order) {
        auto feas = feasible_nodes(*app.find(inst.op), cluster);
        const std::string* node = slots.pick(feas);
        if (node == nullptr)
            return InfeasibleReport{inst.op,
                                    feas.empty()
                                        ? "no surviving feasible node for instance " +
                                              to_string(inst)
                                        : "no free slot for instance " + to_string(inst),
                                    feas.empty()};
        p.assignment[inst] = *node;
        slots.take(*node);
    }
    return p;
}

namespace {

// per-operator input rate for an external rate shared equally by sources
std::map<std::string, double> input_rates(const TrainingApp& app, double rate) {
    std::map<std::string, double> in;
    auto order = topo_order(app);
    auto sources = app.sources();
    for (const auto& id : order) in[id] = 0.0;
    for (const auto& s : sources) in[s] = sources.empty() ? 0.0 : rate / sources.size();
    for (const auto& id : order) {
        const OperatorSpec* op = app.find(id);
        double out_rate = in[id] * op->selectivity;
        for (const auto& succ : app.successors(id)) in[succ] += out_rate;
    }
    return in;
}

}  // namespace

PlacementCost estimate_cost(const Placement& p, const TrainingApp& app, const Cluster& cluster,
                            double rate) {
    auto in = input_rates(app, rate);
    double worst = 0.0;
    for (const auto& op : app.operators) {
        double capacity = 0.0;
        int par = p.parallelism.at(op.id);
        for (int r = 0; r < par; ++r) {
            auto it = p.assignment.find({op.id, r});
            if (it == p.assignment.end()) continue;
            capacity += cluster.node_speedup(it->second, app.model_class);
        }
        if (capacity <= 0.0) continue;
        worst = std::max(worst, in[op.id] * op.cost_per_tuple / capacity);
    }
    return PlacementCost{worst, 0.0};
}

double migration_cost(const Placement& before, const Placement& after, const TrainingApp& app) {
    double cost = 0.0;
    auto state_of = [&app](const std::string& id) {
        const OperatorSpec* op = app.find(id);
        return op != nullptr ? op->state_size : 0.0;
    };
    for (const auto& [inst, node] : before.assignment) {
        auto it = after.assignment.find(inst);
        if (it == after.assignment.end() || it->second != node) cost += state_of(inst.op);
    }
    for (const auto& [inst, node] : after.assignment)
        if (!before.assignment.count(inst)) cost += state_of(inst.op);
    return cost;
}

PlaceResult optimal_place_bruteforce(const TrainingApp& app, const Cluster& cluster) {
    if (app.operators.size() > 6)
        throw std::invalid_argument("optimal_place_bruteforce: more than 6 operators");
    std::size_t usable = 0;
    for (const auto& n : cluster.nodes) usable += n.usable() ? 1 : 0;
    if (cluster.nodes.size() > 4)
        throw std::invalid_argument("optimal_place_bruteforce: more than 4 nodes");
    (void)usable;

    auto check = validate_app(app);
    if (!check.ok())
        throw std::invalid_argument("optimal_place_bruteforce: invalid app");

    // instances in (op id, replica) order; candidates pre-filtered by feasibility
    std::vector<InstanceId> instances;
    std::vector<std::vector<std::string>> candidates;
    std::vector<const OperatorSpec*> ops_sorted;
    for (const auto& op : app.operators) ops_sorted.push_back(&op);
    std::sort(ops_sorted.begin(), ops_sorted.end(),
              [](const OperatorSpec* a, const OperatorSpec* b) { return a->id < b->id; });
    for (const OperatorSpec* op : ops_sorted) {
        auto feas = feasible_nodes(*op, cluster);
        if (feas.empty())
            return InfeasibleReport{op->id, "no feasible node for operator '" + op->id + "'", true};
        for (int r = 0; r < op->parallelism_min; ++r) {
            instances.push_back({op->id, r});
            candidates.emplace_back(feas.begin(), feas.end());
        }
    }

    std::map<std::string, int> slots_left;
    for (const auto& n : cluster.nodes)
        if (n.usable()) slots_left[n.id] = n.slots;

    Placement base;
    for (const auto& op : app.operators) base.parallelism[op.id] = op.parallelism_min;

    std::vector<std::string> chosen(instances.size());
    bool found = false;
    double best_cost = std::numeric_limits<double>::infinity();
    Placement best = base;

    // DFS in lexicographic candidate order: the first assignment reaching a
    // given cost is the lexicographically smallest one with that cost.
    auto dfs = [&](auto&& self, std::size_t i) -> void {
        if (i == instances.size()) {
            Placement p = base;
            for (std::size_t k = 0; k < instances.size(); ++k)
                p.assignment[instances[k]] = chosen[k];
            double cost = estimate_cost(p, app, cluster, 1.0).est_epoch_time;
            if (!found || cost < best_cost) {
                found = true;
                best_cost = cost;
                best = p;
            }
            return;
        }
        for (const auto& node : candidates[i]) {
            auto it = slots_left.find(node);
            if (it == slots_left.end() || it->second <= 0) continue;
            --it->second;
            chosen[i] = node;
            self(self, i + 1);
            ++it->second;
        }
    };
    dfs(dfs, 0);

    if (!found) {
        // name the first operator (greedy order) that cannot fit
        auto order = greedy_op_order(app, cluster);
        return InfeasibleReport{order.empty() ? "" : order.front()->id,
                                "no feasible assignment exists", false};
    }
    return best;
}

std::vector<std::string> check_placement(const Placement& p, const TrainingApp& app,
                                         const Cluster& cluster) {
    std::vector<std::string> problems;
    // replica index completeness
    for (const auto& op : app.operators) {
        auto it = p.parallelism.find(op.id);
        if (it == p.parallelism.end()) {
            problems.push_back("operator '" + op.id + "' missing from parallelism map");
            continue;
        }
        if (it->second < 1)
            problems.push_back("operator '" + op.id + "' has parallelism < 1");
        for (int r = 0; r < it->second; ++r)
            if (!p.assignment.count({op.id, r}))
                problems.push_back("instance " + to_string({op.id, r}) + " unassigned");
    }
    for (const auto& [inst, node] : p.assignment) {
        auto it = p.parallelism.find(inst.op);
        if (it == p.parallelism.end() || inst.replica < 0 || inst.replica >= it->second)
            problems.push_back("instance " + to_string(inst) + " outside 0..parallelism-1");
    }
    // node validity, slot caps, sensitivity
    auto used = p.used_slots();
    for (const auto& [node_id, count] : used) {
        const NodeSpec* n = cluster.find(node_id);
        if (n == nullptr || !n->usable()) {
            problems.push_back("node '" + node_id + "' is not usable");
            continue;
        }
        if (count > n->slots)
            problems.push_back("node '" + node_id + "' over capacity (" + std::to_string(count) +
                               " > " + std::to_string(n->slots) + ")");
    }
    for (const auto& [inst, node_id] : p.assignment) {
        const OperatorSpec* op = app.find(inst.op);
        if (op == nullptr) {
            problems.push_back("instance " + to_string(inst) + " of unknown operator");
            continue;
        }
        if (op->sensitivity.empty()) continue;
        const NodeSpec* n = cluster.find(node_id);
        if (n == nullptr || n->tier != Tier::edge || !n->hosted_datasets.count(op->sensitivity))
            problems.push_back("sensitive instance " + to_string(inst) + " on disallowed node '" +
                               node_id + "'");
    }
    return problems;
}

}  // namespace c2e
