// Copyright 2026 the c2esim authors
// SPDX-License-Identifier: Apache-2.0

#ifndef C2E_SIMENGINE_HPP
#define C2E_SIMENGINE_HPP

#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <queue>
#include <set>
#include <random>
#include <string>
#include <vector>

#include "c2e/scenario.hpp"

namespace c2e {

enum class EventKind {
    tuple_batch,
    failure,
    autoscale_tick,
    epoch_complete,
    training_complete,
    replication_done,
};

std::string to_string(EventKind k);

struct SimEvent {
    double time = 0.0;
    EventKind kind = EventKind::tuple_batch;
    std::string node_id;     // failure payload
    std::uint64_t epoch_gen = 0;  // epoch_complete payload: schedule generation
    std::uint64_t seq = 0;   // insertion sequence, set by the engine
};

struct TimeRow {
    long t = 0;  // row covers [t, t+1)
    double input_rate = 0.0;
    double processed_rate = 0.0;  // sink throughput
    long alive_node_count = 0;
    long active_node_count = 0;
    std::vector<double> backlog;      // parallel to MetricsReport::op_ids
    std::vector<int> parallelism;
    std::vector<double> utilization;
};

struct EventRow {
    double time = 0.0;
    std::string kind;    // placement | decision | failure | warning | abort
    std::string detail;
};

struct OpTotals {
    double injected = 0.0;
    double processed = 0.0;
    double dropped = 0.0;
};

struct MetricsReport {
    std::vector<std::string> op_ids;  // column order (lexicographic)
    std::vector<TimeRow> timeseries;
    std::vector<EventRow> events;
    std::vector<std::pair<double, Placement>> placements;  // snapshot at every change
    std::vector<double> epoch_times;  // completion time of each trainer epoch
    std::map<std::string, OpTotals> totals;

    double training_completion_time = -1.0;  // -1: target not reached
    double final_accuracy = 0.0;
    double replication_time = -1.0;
    long total_migrations = 0;
    long epochs_completed = 0;
    bool aborted = false;
    std::string abort_reason;

    double backlog_at_end(const std::string& op) const;
};

/// Deterministic discrete-event engine. One instance per run; independent
/// runs may execute concurrently.
class Simulation {
  public:
    explicit Simulation(const Scenario& scenario);

    /// Processes the next event; returns false once the run is finished
    /// (horizon reached or aborted).
    bool step();

    void run();

    const MetricsReport& report() const { return report_; }
    MetricsReport take_report() { return std::move(report_); }

    // introspection (tests)
    double now() const { return clock_; }
    const Cluster& cluster() const { return cluster_; }
    const Placement& placement() const { return placement_; }
    double backlog_of(const std::string& op) const;
    bool finished() const { return finished_; }

  private:
    struct OpState {
        double injected = 0.0;
        double processed = 0.0;
        double dropped = 0.0;
        double queue() const { return injected - processed - dropped; }
        std::deque<OpWindowSample> window;
    };

    void push_event(double time, EventKind kind, std::string node_id = {},
                    std::uint64_t epoch_gen = 0);
    void handle_tuple_batch(double t);
    void handle_failure(const SimEvent& ev);
    void handle_autoscale_tick(double t);
    void handle_epoch_complete(const SimEvent& ev);
    void handle_training_complete(double t);
    void handle_replication_done(double t);
    void refresh_trainer_rate(double t);
    void snapshot_placement(double t);
    void record_event(double t, const std::string& kind, const std::string& detail);
    void abort_run(double t, const std::string& reason);
    void finalize();
    double op_capacity_per_sec(const std::string& op_id) const;
    void rebalance_after_failure(double t, std::vector<InstanceId> evicted,
                                 const Placement& before);

    Scenario scenario_;
    Cluster cluster_;
    Placement placement_;
    MetricsReport report_;
    std::vector<std::string> topo_;
    std::set<std::string> sink_ops_;  // out-degree 0
    std::map<std::string, OpState> ops_;
    std::mt19937_64 rng_;

    struct EventOrder {
        bool operator()(const SimEvent& a, const SimEvent& b) const;
    };
    std::priority_queue<SimEvent, std::vector<SimEvent>, EventOrder> queue_;
    std::uint64_t seq_ = 0;

    double clock_ = 0.0;
    bool finished_ = false;
    bool training_done_ = false;

    // trainer progress
    double epoch_rate_ = 0.0;        // epochs per second, aggregate
    double epoch_progress_ = 0.0;    // fraction of the current epoch
    double epoch_rate_since_ = 0.0;  // time of the last rate refresh
    std::uint64_t epoch_gen_ = 0;    // invalidates stale epoch_complete events

    double last_decision_time_ = 0.0;
    bool any_decision_ = false;
};

/// Pure function of the scenario (including seed).
MetricsReport simulate(const Scenario& scenario);

/// Writes timeseries.csv, events.csv and summary.csv into dir (created if
/// missing). Deterministic bytes; shortest round-trip number formatting.
void export_metrics(const MetricsReport& report, const std::filesystem::path& dir);

}  // namespace c2e

#endif  // C2E_SIMENGINE_HPP
