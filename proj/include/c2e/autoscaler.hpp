// Copyright 2026 the c2esim authors
// SPDX-License-Identifier: Apache-2.0

#ifndef C2E_AUTOSCALER_HPP
#define C2E_AUTOSCALER_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "c2e/placer.hpp"

namespace c2e {

struct AutoscalePolicy {
    double theta_up = 0.8;
    double theta_down = 0.3;
    double cooldown = 30.0;  // seconds between load-driven decisions
    double window = 60.0;    // seconds of metrics history per decision
    int node_step = 1;

    bool operator==(const AutoscalePolicy&) const = default;
};

enum class Trend { rising, flat, falling };

std::string to_string(Trend t);

/// One tick of per-operator observations.
struct OpWindowSample {
    double utilization = 0.0;
    double backlog = 0.0;
};

struct UtilizationStats {
    std::map<std::string, double> utilization;  // window mean, demand/capacity
    std::map<std::string, Trend> backlog_trend;
};

enum class ScaleReason { overload, underload, failure_compensation, none };

std::string to_string(ScaleReason r);

struct ScaleDecision {
    std::map<std::string, int> op_parallelism_delta;
    int node_delta = 0;
    ScaleReason reason = ScaleReason::none;

    bool is_none() const { return reason == ScaleReason::none; }
};

/// Aggregates a non-empty window of samples into per-operator utilization
/// and backlog trend (first half vs second half, 5% dead-band).
/// Throws std::invalid_argument on an empty window.
UtilizationStats observe(const std::map<std::string, std::vector<OpWindowSample>>& window);

/// Threshold policy with hysteresis. Cooldown gating is the caller's job
/// (the engine owns the last-decision timestamp).
ScaleDecision decide(const UtilizationStats& stats, const AutoscalePolicy& policy,
                     const Placement& current, const Cluster& cluster, const TrainingApp& app);

struct ApplyOutcome {
    Cluster cluster;
    Placement placement;
    bool applied = true;  // false: decision rolled back
    std::optional<InfeasibleReport> rollback;
    std::vector<std::string> warnings;
    std::vector<std::string> activated_nodes;
    std::vector<std::string> deactivated_nodes;
    std::vector<InstanceId> added;
    std::vector<InstanceId> removed;
};

/// Applies a decision: node activations first, new replicas via the
/// rebalance rule, replica removals, then deactivation of emptied nodes.
/// Any infeasibility rolls the whole decision back.
ApplyOutcome apply_decision(const ScaleDecision& decision, const TrainingApp& app,
                            const Cluster& cluster, const Placement& placement);

}  // namespace c2e

#endif  // C2E_AUTOSCALER_HPP
