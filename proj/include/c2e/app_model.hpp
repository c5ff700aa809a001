// Copyright 2026 the c2esim authors
// SPDX-License-Identifier: Apache-2.0

#ifndef C2E_APP_MODEL_HPP
#define C2E_APP_MODEL_HPP

#include <compare>
#include <optional>
#include <string>
#include <vector>

namespace c2e {

enum class ModelClass { MLP, CNN };

std::string to_string(ModelClass mc);
std::optional<ModelClass> model_class_from_string(const std::string& s);

enum class OpKind { source, transform, trainer, aggregator, sink };

std::string to_string(OpKind k);
std::optional<OpKind> op_kind_from_string(const std::string& s);

/// One vertex of the training-application DAG. Operators are cost models;
/// no operator code is ever executed.
struct OperatorSpec {
    std::string id;
    OpKind kind = OpKind::transform;
    std::string sensitivity;  // dataset id; empty = not sensitive
    double selectivity = 1.0;
    double cost_per_tuple = 1.0;
    int parallelism_min = 1;
    int parallelism_max = 1;
    double state_size = 0.0;

    bool operator==(const OperatorSpec&) const = default;
};

struct TrainingApp {
    std::vector<OperatorSpec> operators;  // sorted by id after parse
    std::vector<std::pair<std::string, std::string>> edges;  // sorted
    ModelClass model_class = ModelClass::MLP;

    bool operator==(const TrainingApp&) const = default;

    const OperatorSpec* find(const std::string& id) const;
    std::vector<std::string> sources() const;  // in-degree 0
    std::vector<std::string> sinks() const;    // out-degree 0
    std::vector<std::string> predecessors(const std::string& id) const;
    std::vector<std::string> successors(const std::string& id) const;
};

struct Violation {
    std::string invariant;  // short name, e.g. "cycle"
    std::string detail;
};

struct ValidationResult {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

/// Checks every TrainingApp invariant; each failed invariant is listed
/// exactly once. Never throws.
ValidationResult validate_app(const TrainingApp& app);

/// Deterministic topological order (lexicographically smallest).
/// Throws std::invalid_argument if validate_app fails.
std::vector<std::string> topo_order(const TrainingApp& app);

}  // namespace c2e

#endif  // C2E_APP_MODEL_HPP
