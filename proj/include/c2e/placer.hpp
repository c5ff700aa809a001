// Copyright 2026 the c2esim authors
// SPDX-License-Identifier: Apache-2.0

#ifndef C2E_PLACER_HPP
#define C2E_PLACER_HPP

#include <compare>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "c2e/app_model.hpp"
#include "c2e/cluster_model.hpp"

namespace c2e {

/// One replica of an operator.
struct InstanceId {
    std::string op;
    int replica = 0;

    auto operator<=>(const InstanceId&) const = default;
};

std::string to_string(const InstanceId& id);

struct Placement {
    std::map<InstanceId, std::string> assignment;  // instance -> node id
    std::map<std::string, int> parallelism;        // operator -> replica count

    bool operator==(const Placement&) const = default;

    std::vector<InstanceId> instances_on(const std::string& node_id) const;
    std::map<std::string, int> used_slots() const;  // node -> instance count
};

struct PlacementCost {
    double est_epoch_time = 0.0;  // bottleneck demand / capacity
    double migration_cost = 0.0;  // sum of state_size of moved instances
};

struct InfeasibleReport {
    std::string op;       // first operator with insufficient feasible capacity
    std::string reason;
    bool no_feasible_node = false;  // true: feasible set empty; false: out of slots
};

using PlaceResult = std::variant<Placement, InfeasibleReport>;

inline bool feasible(const PlaceResult& r) { return std::holds_alternative<Placement>(r); }

/// Usable nodes an operator may run on. A sensitive operator is confined to
/// edge nodes hosting its dataset; anything else may go anywhere.
std::set<std::string> feasible_nodes(const OperatorSpec& op, const Cluster& cluster);

/// Greedy initial placement at parallelism_min: operators ordered by
/// (|feasible set| ascending, id), each replica to the feasible node with
/// most free slots (ties: lexicographic node id).
PlaceResult place(const TrainingApp& app, const Cluster& cluster);

/// Reassigns exactly the evicted instances with the same greedy rule;
/// every other instance stays where it was.
PlaceResult rebalance(const Placement& current, const TrainingApp& app, const Cluster& cluster,
                      const std::vector<InstanceId>& evicted);

/// Exhaustive test oracle at parallelism_min, minimizing est_epoch_time
/// (ties: lexicographically smallest assignment). Guarded to <= 6 operators
/// and <= 4 nodes; throws std::invalid_argument beyond that.
PlaceResult optimal_place_bruteforce(const TrainingApp& app, const Cluster& cluster);

/// Bottleneck estimate at the given input rate; migration_cost is 0 here
/// (see migration_cost() for placement deltas).
PlacementCost estimate_cost(const Placement& p, const TrainingApp& app, const Cluster& cluster,
                            double rate);

/// Sum of state_size over instances that moved, appeared or disappeared
/// between the two placements.
double migration_cost(const Placement& before, const Placement& after, const TrainingApp& app);

/// Full invariant check used by the engine before accepting any placement.
std::vector<std::string> check_placement(const Placement& p, const TrainingApp& app,
                                         const Cluster& cluster);

}  // namespace c2e

#endif  // C2E_PLACER_HPP
