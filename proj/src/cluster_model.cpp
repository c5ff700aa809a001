// Copyright 2026 the c2esim authors
// SPDX-License-Identifier: Apache-2.0

#include "c2e/cluster_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "c2e/placer.hpp"

namespace c2e {

std::string to_string(Tier t) {
    return t == Tier::cloud ? "cloud" : "edge";
}

std::optional<Tier> tier_from_string(const std::string& s) {
    if (s == "cloud") return Tier::cloud;
    if (s == "edge") return Tier::edge;
    return std::nullopt;
}

const NodeSpec* Cluster::find(const std::string& id) const {
    for (const auto& n : nodes)
        if (n.id == id) return &n;
    return nullptr;
}

NodeSpec* Cluster::find(const std::string& id) {
    for (auto& n : nodes)
        if (n.id == id) return &n;
    return nullptr;
}

int Cluster::alive_count() const {
    return static_cast<int>(std::count_if(nodes.begin(), nodes.end(),
                                          [](const NodeSpec& n) { return n.alive; }));
}

int Cluster::active_count() const {
    return static_cast<int>(std::count_if(nodes.begin(), nodes.end(),
                                          [](const NodeSpec& n) { return n.usable(); }));
}

const DeviceProfile& Cluster::profile_of(const NodeSpec& n) const {
    auto it = profiles.find(n.device);
    if (it == profiles.end())
        throw std::out_of_range("unknown device profile '" + n.device + "'");
    return it->second;
}

double Cluster::node_speedup(const std::string& node_id, ModelClass mc) const {
    const NodeSpec* n = find(node_id);
    if (n == nullptr) throw std::out_of_range("unknown node '" + node_id + "'");
    const auto& prof = profile_of(*n);
    auto it = prof.speedup.find(mc);
    if (it == prof.speedup.end())
        throw std::out_of_range("device '" + prof.name + "' has no speedup for " + to_string(mc));
    return it->second;
}

double device_epoch_time(const DeviceProfile& profile, const TrainingProfile& training) {
    auto it = profile.speedup.find(training.model_class);
    if (it == profile.speedup.end())
        throw std::out_of_range("device '" + profile.name + "' has no speedup for " +
                                to_string(training.model_class));
    return training.base_epoch_time / it->second;
}

double accuracy_after(const TrainingProfile& training, long epochs) {
    if (epochs < 0) throw std::invalid_argument("accuracy_after: negative epochs");
    return training.a_max * (1.0 - std::exp(-static_cast<double>(epochs) / training.tau));
}

std::vector<InstanceId> apply_failure(Cluster& cluster, const Placement& placement,
                                      const std::string& node_id) {
    NodeSpec* node = cluster.find(node_id);
    if (node == nullptr) throw std::invalid_argument("apply_failure: unknown node '" + node_id + "'");
    if (!node->alive)
        throw std::invalid_argument("apply_failure: node '" + node_id + "' already failed");
    node->alive = false;  // permanent for the run
    return placement.instances_on(node_id);
}

std::map<std::string, DeviceProfile> default_device_profiles() {
    std::map<std::string, DeviceProfile> out;
    auto put = [&out](const std::string& name, double mlp, double cnn) {
        out[name] = DeviceProfile{name, {{ModelClass::MLP, mlp}, {ModelClass::CNN, cnn}}};
    };
    put("reference-CPU", 1.0, 1.0);
    put("Tesla-K20c", 14.0, 73.0);
    put("Quadro-K4000", 6.0, 38.0);
    // nominal edge devices; scenarios are expected to override these
    put("Jetson-AGX", 8.0, 30.0);
    put("Kalray-Konic", 4.0, 12.0);
    put("RaspberryPi-3B+", 0.25, 0.05);
    return out;
}

TrainingProfile default_training_profile(ModelClass mc) {
    // tau calibrated so the CNN first crosses 0.98 at epoch 5 and the MLP
    // at epoch 50; plateaus are the reported maximum accuracies.
    if (mc == ModelClass::CNN) return TrainingProfile{ModelClass::CNN, 0.9921, 1.1, 14.0};
    return TrainingProfile{ModelClass::MLP, 0.9856, 9.6, 14.0};
}

}  // namespace c2e
