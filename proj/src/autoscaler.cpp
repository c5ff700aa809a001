// Copyright 2026 the c2esim authors
// SPDX-License-Identifier: Apache-2.0

#include "c2e/autoscaler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace c2e {

std::string to_string(Trend t) {
    switch (t) {
        case Trend::rising: return "rising";
        case Trend::flat: return "flat";
        case Trend::falling: return "falling";
    }
    return "flat";
}

std::string to_string(ScaleReason r) {
    switch (r) {
        case ScaleReason::overload: return "overload";
        case ScaleReason::underload: return "underload";
        case ScaleReason::failure_compensation: return "failure_compensation";
        case ScaleReason::none: return "none";
    }
    return "none";
}

UtilizationStats observe(const std::map<std::string, std::vector<OpWindowSample>>& window) {
    bool any = false;
    for (const auto& [op, samples] : window) any |= !samples.empty();
    if (!any) throw std::invalid_argument("observe: empty window");

    UtilizationStats stats;
    constexpr double kDeadBand = 0.05;
    constexpr double kEps = 1e-9;
    for (const auto& [op, samples] : window) {
        if (samples.empty()) continue;
        double util = 0.0;
        for (const auto& s : samples) util += s.utilization;
        stats.utilization[op] = util / samples.size();

        std::size_t half = samples.size() / 2;
        if (half == 0) {
            stats.backlog_trend[op] = Trend::flat;
            continue;
        }
        double first = 0.0, second = 0.0;
        for (std::size_t i = 0; i < half; ++i) first += samples[i].backlog;
        for (std::size_t i = half; i < samples.size(); ++i) second += samples[i].backlog;
        first /= half;
        second /= (samples.size() - half);
        Trend t = Trend::flat;
        if (first < kEps) {
            t = second > kEps ? Trend::rising : Trend::flat;
        } else if (second > first * (1.0 + kDeadBand)) {
            t = Trend::rising;
        } else if (second < first * (1.0 - kDeadBand)) {
            t = Trend::falling;
        }
        stats.backlog_trend[op] = t;
    }
    return stats;
}

namespace {

int free_slot_count(const Cluster& cluster, const Placement& p) {
    auto used = p.used_slots();
    int total = 0;
    for (const auto& n : cluster.nodes) {
        if (!n.usable()) continue;
        auto it = used.find(n.id);
        total += std::max(0, n.slots - (it == used.end() ? 0 : it->second));
    }
    return total;
}

int inactive_alive_count(const Cluster& cluster) {
    int c = 0;
    for (const auto& n : cluster.nodes) c += (n.alive && !n.active) ? 1 : 0;
    return c;
}

bool has_free_feasible_slot(const OperatorSpec& op, const Cluster& cluster, const Placement& p) {
    auto feas = feasible_nodes(op, cluster);
    auto used = p.used_slots();
    for (const auto& id : feas) {
        const NodeSpec* n = cluster.find(id);
        auto it = used.find(id);
        if (n->slots - (it == used.end() ? 0 : it->second) > 0) return true;
    }
    return false;
}

}  // namespace

ScaleDecision decide(const UtilizationStats& stats, const AutoscalePolicy& policy,
                     const Placement& current, const Cluster& cluster, const TrainingApp& app) {
    auto util_of = [&stats](const std::string& id) {
        auto it = stats.utilization.find(id);
        return it == stats.utilization.end() ? 0.0 : it->second;
    };

    std::vector<const OperatorSpec*> ops;
    for (const auto& op : app.operators) ops.push_back(&op);
    std::sort(ops.begin(), ops.end(),
              [](const OperatorSpec* a, const OperatorSpec* b) { return a->id < b->id; });

    std::vector<const OperatorSpec*> overloaded;
    bool all_below_down = true;
    for (const OperatorSpec* op : ops) {
        double u = util_of(op->id);
        if (u > policy.theta_up) overloaded.push_back(op);
        if (u >= policy.theta_down) all_below_down = false;
    }

    ScaleDecision d;
    if (!overloaded.empty()) {
        for (const OperatorSpec* op : overloaded)
            if (current.parallelism.at(op->id) < op->parallelism_max)
                d.op_parallelism_delta[op->id] = +1;
        if (d.op_parallelism_delta.empty()) return d;  // everything capped

        int needed = static_cast<int>(d.op_parallelism_delta.size());
        int free = free_slot_count(cluster, current);
        if (free < needed) {
            int headroom =
                std::min(policy.node_step,
                         std::min(cluster.pool_max - cluster.active_count(),
                                  inactive_alive_count(cluster)));
            d.node_delta = std::max(0, headroom);
            if (d.node_delta == 0) {
                // pool exhausted: only scale operators that have room right now
                std::erase_if(d.op_parallelism_delta, [&](const auto& kv) {
                    return !has_free_feasible_slot(*app.find(kv.first), cluster, current);
                });
                if (d.op_parallelism_delta.empty()) return ScaleDecision{};
            }
        }
        d.reason = ScaleReason::overload;
        return d;
    }

    if (all_below_down) {
        const OperatorSpec* least = nullptr;
        double least_util = 0.0;
        for (const OperatorSpec* op : ops) {
            if (current.parallelism.at(op->id) <= op->parallelism_min) continue;
            double u = util_of(op->id);
            if (least == nullptr || u < least_util) {
                least = op;
                least_util = u;
            }
        }
        bool removal_empties_node = false;
        if (least != nullptr) {
            int par = current.parallelism.at(least->id);
            auto it = current.assignment.find({least->id, par - 1});
            if (it != current.assignment.end())
                removal_empties_node = current.instances_on(it->second).size() == 1;
        }
        int empty_active = 0;
        auto used = current.used_slots();
        for (const auto& n : cluster.nodes)
            if (n.usable() && !used.count(n.id)) ++empty_active;

        if (least != nullptr) d.op_parallelism_delta[least->id] = -1;
        if ((empty_active > 0 || removal_empties_node) && cluster.active_count() > 1)
            d.node_delta = -std::min(policy.node_step, cluster.active_count() - 1);
        if (d.op_parallelism_delta.empty() && d.node_delta == 0) return d;
        d.reason = ScaleReason::underload;
        return d;
    }

    return d;  // inside the dead band
}

ApplyOutcome apply_decision(const ScaleDecision& decision, const TrainingApp& app,
                            const Cluster& cluster, const Placement& placement) {
    ApplyOutcome out;
    out.cluster = cluster;
    out.placement = placement;
    if (decision.is_none()) return out;

    // node activations first so new replicas can land on them
    if (decision.node_delta > 0) {
        std::set<std::string> scaling_ops;
        for (const auto& [op, delta] : decision.op_parallelism_delta)
            if (delta > 0) scaling_ops.insert(op);
        auto would_fit = [&](const NodeSpec& n) {
            for (const auto& id : scaling_ops) {
                const OperatorSpec* op = app.find(id);
                if (op == nullptr) continue;
                if (op->sensitivity.empty()) return true;
                if (n.tier == Tier::edge && n.hosted_datasets.count(op->sensitivity)) return true;
            }
            return scaling_ops.empty();
        };
        std::vector<NodeSpec*> candidates;
        for (auto& n : out.cluster.nodes)
            if (n.alive && !n.active) candidates.push_back(&n);
        std::sort(candidates.begin(), candidates.end(), [&](NodeSpec* a, NodeSpec* b) {
            bool fa = would_fit(*a), fb = would_fit(*b);
            if (fa != fb) return fa;
            return a->id < b->id;
        });
        int budget = std::min(decision.node_delta,
                              out.cluster.pool_max - out.cluster.active_count());
        for (NodeSpec* n : candidates) {
            if (budget <= 0) break;
            n->active = true;
            out.activated_nodes.push_back(n->id);
            --budget;
        }
        if (static_cast<int>(out.activated_nodes.size()) < decision.node_delta)
            out.warnings.push_back("node activation limited to " +
                                   std::to_string(out.activated_nodes.size()) + " of " +
                                   std::to_string(decision.node_delta));
    }

    // scale-out replicas via the rebalance rule
    std::vector<InstanceId> new_replicas;
    for (const auto& [op_id, delta] : decision.op_parallelism_delta) {
        if (delta <= 0) continue;
        const OperatorSpec* op = app.find(op_id);
        if (op == nullptr) continue;
        int par = out.placement.parallelism.at(op_id);
        int grow = std::min(delta, op->parallelism_max - par);
        if (grow < delta)
            out.warnings.push_back("operator '" + op_id + "' capped at parallelism_max");
        for (int i = 0; i < grow; ++i) new_replicas.push_back({op_id, par + i});
        out.placement.parallelism[op_id] = par + grow;
    }
    if (!new_replicas.empty()) {
        auto res = rebalance(out.placement, app, out.cluster, new_replicas);
        if (!feasible(res)) {
            ApplyOutcome rolled;
            rolled.cluster = cluster;
            rolled.placement = placement;
            rolled.applied = false;
            rolled.rollback = std::get<InfeasibleReport>(res);
            rolled.warnings = out.warnings;
            return rolled;
        }
        out.placement = std::get<Placement>(res);
        out.added = new_replicas;
    }

    // scale-in removals, then release emptied nodes
    for (const auto& [op_id, delta] : decision.op_parallelism_delta) {
        if (delta >= 0) continue;
        const OperatorSpec* op = app.find(op_id);
        if (op == nullptr) continue;
        for (int i = 0; i < -delta; ++i) {
            int par = out.placement.parallelism.at(op_id);
            if (par <= op->parallelism_min) {
                out.warnings.push_back("operator '" + op_id + "' already at parallelism_min");
                break;
            }
            InstanceId inst{op_id, par - 1};
            out.placement.assignment.erase(inst);
            out.placement.parallelism[op_id] = par - 1;
            out.removed.push_back(inst);
        }
    }
    if (decision.node_delta < 0) {
        for (int i = 0; i < -decision.node_delta; ++i) {
            if (out.cluster.active_count() <= 1) break;
            // lexicographically largest empty active node
            auto used = out.placement.used_slots();
            NodeSpec* victim = nullptr;
            for (auto& n : out.cluster.nodes) {
                if (!n.usable() || used.count(n.id)) continue;
                if (victim == nullptr || n.id > victim->id) victim = &n;
            }
            if (victim == nullptr) {
                out.warnings.push_back("no empty node to deactivate; no node removed");
                break;
            }
            victim->active = false;
            out.deactivated_nodes.push_back(victim->id);
        }
    }

    auto problems = check_placement(out.placement, app, out.cluster);
    if (!problems.empty())
        throw std::logic_error("apply_decision produced an invalid placement: " + problems[0]);
    return out;
}

}  // namespace c2e
