// Copyright 2026 the c2esim authors
// SPDX-License-Identifier: Apache-2.0

#ifndef C2E_CLUSTER_MODEL_HPP
#define C2E_CLUSTER_MODEL_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "c2e/app_model.hpp"

namespace c2e {

struct Placement;  // placer.hpp
struct InstanceId;

/// Per-device epoch-time divisor relative to the reference CPU.
struct DeviceProfile {
    std::string name;
    std::map<ModelClass, double> speedup;

    bool operator==(const DeviceProfile&) const = default;
};

enum class Tier { cloud, edge };

std::string to_string(Tier t);
std::optional<Tier> tier_from_string(const std::string& s);

struct NodeSpec {
    std::string id;
    Tier tier = Tier::cloud;
    std::string device;  // DeviceProfile name
    int slots = 1;
    std::set<std::string> hosted_datasets;  // edge nodes only
    bool alive = true;
    bool active = true;  // allocation state, toggled by the autoscaler
    bool has_final_model = false;

    bool operator==(const NodeSpec&) const = default;

    // usable for placement
    bool usable() const { return alive && active; }
};

struct Cluster {
    std::vector<NodeSpec> nodes;  // sorted by id after parse
    int pool_max = 0;
    std::map<std::string, DeviceProfile> profiles;

    bool operator==(const Cluster&) const = default;

    const NodeSpec* find(const std::string& id) const;
    NodeSpec* find(const std::string& id);
    int alive_count() const;
    int active_count() const;  // alive && active
    const DeviceProfile& profile_of(const NodeSpec& n) const;
    double node_speedup(const std::string& node_id, ModelClass mc) const;
};

/// Saturating-exponential training-progress profile.
struct TrainingProfile {
    ModelClass model_class = ModelClass::MLP;
    double a_max = 1.0;
    double tau = 1.0;
    double base_epoch_time = 14.0;  // reference-CPU seconds per epoch

    bool operator==(const TrainingProfile&) const = default;
};

struct FailureEvent {
    double time = 0.0;
    std::string node_id;

    bool operator==(const FailureEvent&) const = default;
};

struct FailureSchedule {
    std::vector<FailureEvent> events;

    bool operator==(const FailureSchedule&) const = default;
};

/// Epoch time of one instance of the model class on this device.
/// Throws std::out_of_range if the profile lacks the model class.
double device_epoch_time(const DeviceProfile& profile, const TrainingProfile& training);

/// a_max * (1 - exp(-epochs / tau)); monotone, bounded by a_max.
double accuracy_after(const TrainingProfile& training, long epochs);

/// Marks the node dead (permanently) and returns the instances that were
/// placed on it, in deterministic (op, replica) order.
/// Throws std::invalid_argument on unknown or already-failed nodes.
std::vector<InstanceId> apply_failure(Cluster& cluster, const Placement& placement,
                                      const std::string& node_id);

/// Built-in device profiles: reference-CPU and the Tesla/Quadro factors,
/// plus nominal edge devices whose speedups are scenario-overridable.
std::map<std::string, DeviceProfile> default_device_profiles();

TrainingProfile default_training_profile(ModelClass mc);

}  // namespace c2e

#endif  // C2E_CLUSTER_MODEL_HPP
