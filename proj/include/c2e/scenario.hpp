// Copyright 2026 the c2esim authors
// SPDX-License-Identifier: Apache-2.0

#ifndef C2E_SCENARIO_HPP
#define C2E_SCENARIO_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "c2e/app_model.hpp"
#include "c2e/autoscaler.hpp"
#include "c2e/cluster_model.hpp"

namespace c2e {

/// Piecewise-constant input rate; breakpoints (t, rate), t strictly
/// increasing starting at 0.
struct WorkloadTrace {
    std::vector<std::pair<double, double>> breakpoints;

    bool operator==(const WorkloadTrace&) const = default;

    double rate_at(double t) const;
};

/// One file = one reproducible experiment.
struct Scenario {
    TrainingApp app;
    Cluster cluster;
    WorkloadTrace trace;
    FailureSchedule failures;
    AutoscalePolicy policy;
    std::uint64_t seed = 0;
    double horizon = 0.0;

    // optional knobs (scenario defaults)
    double target_accuracy = 0.98;
    double queue_cap = 0.0;   // per-operator queue cap in tuples; 0 = unbounded
    double rate_jitter = 0.05;

    std::map<ModelClass, TrainingProfile> training;  // per model class

    bool operator==(const Scenario&) const = default;

    const TrainingProfile& training_profile() const { return training.at(app.model_class); }
};

struct ParseIssue {
    enum class Kind { syntax, reference, invariant };
    Kind kind = Kind::syntax;
    std::string where;    // JSON-ish path or section
    std::string message;  // includes the failing invariant name
};

class ScenarioError : public std::runtime_error {
  public:
    explicit ScenarioError(std::vector<ParseIssue> issues);

    const std::vector<ParseIssue>& issues() const { return issues_; }
    bool syntax_only() const;  // true if every issue is a syntax issue

  private:
    std::vector<ParseIssue> issues_;
};

/// Parses and fully validates a scenario document. Throws ScenarioError
/// carrying either the syntax error (with line/column) or every semantic
/// violation found.
Scenario parse_scenario(const std::string& text);

Scenario parse_scenario_file(const std::filesystem::path& path);

/// Canonical rendering; parse_scenario(render_scenario(s)) == s.
std::string render_scenario(const Scenario& s);

/// Applies dotted-path `key=value` overrides (e.g. policy.theta_up=0.9,
/// cluster.nodes.0.device=Tesla-K20c) to the raw document. Values are
/// parsed as JSON when possible, else taken as strings. Paths must resolve.
std::string apply_scenario_overrides(const std::string& text,
                                     const std::vector<std::string>& overrides);

}  // namespace c2e

#endif  // C2E_SCENARIO_HPP
