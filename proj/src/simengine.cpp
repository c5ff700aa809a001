// Copyright 2026 the c2esim authors
// SPDX-License-Identifier: Apache-2.0

#include "c2e/simengine.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "c2e/num_format.hpp"

namespace c2e {

std::string to_string(EventKind k) {
    switch (k) {
        case EventKind::tuple_batch: return "tuple_batch";
        case EventKind::failure: return "failure";
        case EventKind::autoscale_tick: return "autoscale_tick";
        case EventKind::epoch_complete: return "epoch_complete";
        case EventKind::training_complete: return "training_complete";
        case EventKind::replication_done: return "replication_done";
    }
    return "tuple_batch";
}

namespace {

int kind_priority(EventKind k) {
    switch (k) {
        case EventKind::failure: return 0;
        case EventKind::tuple_batch: return 1;
        case EventKind::autoscale_tick: return 2;
        case EventKind::epoch_complete: return 3;
        case EventKind::training_complete: return 4;
        case EventKind::replication_done: return 5;
    }
    return 9;
}

std::string fmt_num(double v) { return format_shortest(v); }

std::string render_placement(const Placement& p) {
    std::string out;
    for (const auto& [inst, node] : p.assignment) {
        if (!out.empty()) out += ";";
        out += to_string(inst) + "=" + node;
    }
    return out;
}

}  // namespace

double MetricsReport::backlog_at_end(const std::string& op) const {
    auto it = std::find(op_ids.begin(), op_ids.end(), op);
    if (it == op_ids.end() || timeseries.empty()) return 0.0;
    return timeseries.back().backlog[static_cast<std::size_t>(it - op_ids.begin())];
}

bool Simulation::EventOrder::operator()(const SimEvent& a, const SimEvent& b) const {
    if (a.time != b.time) return a.time > b.time;  // min-heap
    int pa = kind_priority(a.kind), pb = kind_priority(b.kind);
    if (pa != pb) return pa > pb;
    return a.seq > b.seq;
}

Simulation::Simulation(const Scenario& scenario)
    : scenario_(scenario), cluster_(scenario.cluster), rng_(scenario.seed) {
    auto check = validate_app(scenario_.app);
    if (!check.ok())
        throw std::invalid_argument("simulate: invalid app (" + check.violations[0].invariant +
                                    ")");
    if (!(scenario_.horizon > 0)) throw std::invalid_argument("simulate: horizon > 0 violated");

    for (ModelClass mc : {ModelClass::MLP, ModelClass::CNN})
        scenario_.training.emplace(mc, default_training_profile(mc));

    topo_ = topo_order(scenario_.app);
    for (const auto& op : scenario_.app.operators) {
        report_.op_ids.push_back(op.id);
        ops_[op.id] = OpState{};
    }
    std::sort(report_.op_ids.begin(), report_.op_ids.end());
    for (const auto& id : scenario_.app.sinks()) sink_ops_.insert(id);

    last_decision_time_ = -std::numeric_limits<double>::infinity();

    auto placed = place(scenario_.app, cluster_);
    if (!feasible(placed)) {
        const auto& rep = std::get<InfeasibleReport>(placed);
        abort_run(0.0, "infeasible initial placement: " + rep.reason);
        return;
    }
    placement_ = std::get<Placement>(placed);
    snapshot_placement(0.0);

    push_event(0.0, EventKind::tuple_batch);
    push_event(0.0, EventKind::autoscale_tick);
    for (const auto& ev : scenario_.failures.events)
        push_event(ev.time, EventKind::failure, ev.node_id);
    refresh_trainer_rate(0.0);
}

void Simulation::push_event(double time, EventKind kind, std::string node_id,
                            std::uint64_t epoch_gen) {
    SimEvent ev;
    ev.time = time;
    ev.kind = kind;
    ev.node_id = std::move(node_id);
    ev.epoch_gen = epoch_gen;
    ev.seq = seq_++;
    queue_.push(std::move(ev));
}

bool Simulation::step() {
    if (finished_) return false;
    if (queue_.empty()) {
        finalize();
        return false;
    }
    SimEvent ev = queue_.top();
    queue_.pop();
    if (ev.time < clock_ - 1e-9)
        throw std::logic_error("simengine: time regression (" + std::to_string(ev.time) + " < " +
                               std::to_string(clock_) + ")");
    clock_ = std::max(clock_, ev.time);

    switch (ev.kind) {
        case EventKind::tuple_batch: handle_tuple_batch(ev.time); break;
        case EventKind::failure: handle_failure(ev); break;
        case EventKind::autoscale_tick: handle_autoscale_tick(ev.time); break;
        case EventKind::epoch_complete: handle_epoch_complete(ev); break;
        case EventKind::training_complete: handle_training_complete(ev.time); break;
        case EventKind::replication_done: handle_replication_done(ev.time); break;
    }
    if (finished_) return false;
    if (queue_.empty()) {
        finalize();
        return false;
    }
    return true;
}

void Simulation::run() {
    while (step()) {
    }
}

double Simulation::backlog_of(const std::string& op) const {
    auto it = ops_.find(op);
    return it == ops_.end() ? 0.0 : it->second.queue();
}

double Simulation::op_capacity_per_sec(const std::string& op_id) const {
    auto it = placement_.parallelism.find(op_id);
    if (it == placement_.parallelism.end()) return 0.0;
    double cap = 0.0;
    for (int r = 0; r < it->second; ++r) {
        auto a = placement_.assignment.find({op_id, r});
        if (a == placement_.assignment.end()) continue;
        cap += cluster_.node_speedup(a->second, scenario_.app.model_class);
    }
    return cap;
}

void Simulation::handle_tuple_batch(double t) {
    double dt = std::min(1.0, scenario_.horizon - t);
    if (dt <= 0) return;

    double base_rate = scenario_.trace.rate_at(t);
    double rate = base_rate;
    if (scenario_.rate_jitter > 0) {
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        rate = std::max(0.0, base_rate * (1.0 + scenario_.rate_jitter * dist(rng_)));
    }

    auto sources = scenario_.app.sources();
    std::map<std::string, double> arrivals;
    for (const auto& id : report_.op_ids) arrivals[id] = 0.0;
    if (!sources.empty()) {
        double share = rate * dt / static_cast<double>(sources.size());
        for (const auto& s : sources) arrivals[s] = share;
    }

    double sink_processed = 0.0;
    std::size_t window_len =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(scenario_.policy.window)));

    std::map<std::string, double> backlog_now, util_now;
    for (const auto& id : topo_) {
        const OperatorSpec* op = scenario_.app.find(id);
        OpState& st = ops_[id];
        st.injected += arrivals[id];
        double queue_now = st.queue();
        if (scenario_.queue_cap > 0 && queue_now > scenario_.queue_cap) {
            st.dropped += queue_now - scenario_.queue_cap;
            queue_now = scenario_.queue_cap;
        }
        double cap_tuples = op_capacity_per_sec(id) * dt / op->cost_per_tuple;
        double util;
        if (cap_tuples > 0) {
            util = queue_now / cap_tuples;
        } else {
            util = queue_now > 1e-12 ? 1e9 : 0.0;
        }
        double processed = std::min(queue_now, cap_tuples);
        st.processed += processed;
        if (sink_ops_.count(id)) sink_processed += processed;

        double emitted = processed * op->selectivity;
        for (const auto& succ : scenario_.app.successors(id)) arrivals[succ] += emitted;

        st.window.push_back({util, st.queue()});
        while (st.window.size() > window_len) st.window.pop_front();
        backlog_now[id] = st.queue();
        util_now[id] = util;
    }

    TimeRow row;
    row.t = static_cast<long>(std::llround(t));
    row.input_rate = rate;
    row.processed_rate = sink_processed / dt;
    row.alive_node_count = cluster_.alive_count();
    row.active_node_count = cluster_.active_count();
    for (const auto& id : report_.op_ids) {
        row.backlog.push_back(backlog_now[id]);
        row.parallelism.push_back(placement_.parallelism.count(id) ? placement_.parallelism[id]
                                                                   : 0);
        row.utilization.push_back(util_now[id]);
    }
    report_.timeseries.push_back(std::move(row));

    if (t + 1.0 < scenario_.horizon) {
        push_event(t + 1.0, EventKind::tuple_batch);
        push_event(t + 1.0, EventKind::autoscale_tick);
    }
}

void Simulation::handle_failure(const SimEvent& ev) {
    Placement before = placement_;
    std::vector<InstanceId> evicted = apply_failure(cluster_, placement_, ev.node_id);
    record_event(ev.time, "failure",
                 "node=" + ev.node_id + ";evicted=" + std::to_string(evicted.size()));
    if (!evicted.empty()) {
        for (const auto& inst : evicted) placement_.assignment.erase(inst);
        rebalance_after_failure(ev.time, std::move(evicted), before);
    }
    if (!finished_) refresh_trainer_rate(ev.time);
}

void Simulation::rebalance_after_failure(double t, std::vector<InstanceId> evicted,
                                         const Placement& before) {
    std::vector<InstanceId> pending = std::move(evicted);
    std::sort(pending.begin(), pending.end());
    std::map<std::string, int> shed_count;
    int activated = 0;

    Placement plan = placement_;
    while (true) {
        Placement attempt = plan;
        auto res = rebalance(attempt, scenario_.app, cluster_, pending);
        if (feasible(res)) {
            plan = std::get<Placement>(res);
            break;
        }
        const auto& rep = std::get<InfeasibleReport>(res);

        // failure compensation: pull an inactive node into the pool
        if (cluster_.active_count() < cluster_.pool_max) {
            const OperatorSpec* op = scenario_.app.find(rep.op);
            NodeSpec* pick = nullptr;
            bool pick_feasible = false;
            for (auto& n : cluster_.nodes) {
                if (!n.alive || n.active) continue;
                bool fits = op == nullptr || op->sensitivity.empty() ||
                            (n.tier == Tier::edge && n.hosted_datasets.count(op->sensitivity));
                if (pick == nullptr || (fits && !pick_feasible) ||
                    (fits == pick_feasible && n.id < pick->id)) {
                    pick = &n;
                    pick_feasible = fits;
                }
            }
            if (pick != nullptr) {
                pick->active = true;
                ++activated;
                continue;
            }
        }

        // shed replicas of the offending operator down to parallelism_min
        const OperatorSpec* op = scenario_.app.find(rep.op);
        int par = plan.parallelism.at(rep.op) - shed_count[rep.op];
        auto victim = std::find_if(pending.rbegin(), pending.rend(),
                                   [&rep](const InstanceId& i) { return i.op == rep.op; });
        if (op != nullptr && par > op->parallelism_min && victim != pending.rend()) {
            ++shed_count[rep.op];
            pending.erase(std::next(victim).base());
            continue;
        }

        abort_run(t, "infeasible placement after failure of node: " + rep.reason);
        return;
    }

    // compact replica indices of shed operators
    for (const auto& [op_id, shed] : shed_count) {
        if (shed == 0) continue;
        std::vector<std::pair<InstanceId, std::string>> surviving;
        for (auto it = plan.assignment.lower_bound({op_id, 0});
             it != plan.assignment.end() && it->first.op == op_id;) {
            surviving.emplace_back(it->first, it->second);
            it = plan.assignment.erase(it);
        }
        int r = 0;
        for (const auto& [inst, node] : surviving) plan.assignment[{op_id, r++}] = node;
        plan.parallelism[op_id] = r;
        record_event(t, "warning",
                     "operator '" + op_id + "' degraded to parallelism " + std::to_string(r) +
                         " after failure");
    }

    long moved = 0;
    for (const auto& [inst, node] : plan.assignment) {
        auto it = before.assignment.find(inst);
        if (it != before.assignment.end() && it->second != node) ++moved;
    }

    auto problems = check_placement(plan, scenario_.app, cluster_);
    if (!problems.empty())
        throw std::logic_error("rebalance after failure produced invalid placement: " +
                               problems[0]);
    placement_ = std::move(plan);
    report_.total_migrations += moved;
    if (activated > 0) {
        record_event(t, "decision",
                     "reason=failure_compensation;nodes=+" + std::to_string(activated) +
                         ";applied=1");
    }
    snapshot_placement(t);
    refresh_trainer_rate(t);
}

void Simulation::handle_autoscale_tick(double t) {
    if (t - last_decision_time_ < scenario_.policy.cooldown) return;

    std::map<std::string, std::vector<OpWindowSample>> window;
    bool any = false;
    for (const auto& [id, st] : ops_) {
        window[id] = {st.window.begin(), st.window.end()};
        any |= !st.window.empty();
    }
    if (!any) return;

    UtilizationStats stats = observe(window);
    ScaleDecision decision = decide(stats, scenario_.policy, placement_, cluster_, scenario_.app);
    if (decision.is_none()) return;

    ApplyOutcome outcome = apply_decision(decision, scenario_.app, cluster_, placement_);
    std::string detail = "reason=" + to_string(decision.reason);
    for (const auto& [op, delta] : decision.op_parallelism_delta)
        detail += ";" + op + "=" + (delta > 0 ? "+" : "") + std::to_string(delta);
    if (decision.node_delta != 0)
        detail += ";nodes=" + std::string(decision.node_delta > 0 ? "+" : "") +
                  std::to_string(decision.node_delta);
    detail += ";applied=" + std::string(outcome.applied ? "1" : "0");
    if (!outcome.applied && outcome.rollback)
        detail += ";rolled_back=" + outcome.rollback->reason;
    record_event(t, "decision", detail);
    for (const auto& w : outcome.warnings) record_event(t, "warning", w);

    last_decision_time_ = t;
    if (!outcome.applied) return;

    bool changed = outcome.placement != placement_ || outcome.cluster != cluster_;
    cluster_ = std::move(outcome.cluster);
    placement_ = std::move(outcome.placement);
    if (changed) {
        snapshot_placement(t);
        refresh_trainer_rate(t);
    }
}

void Simulation::handle_epoch_complete(const SimEvent& ev) {
    if (ev.epoch_gen != epoch_gen_ || training_done_) return;
    ++report_.epochs_completed;
    report_.epoch_times.push_back(ev.time);
    epoch_progress_ = 0.0;
    epoch_rate_since_ = ev.time;

    double accuracy = accuracy_after(scenario_.training_profile(), report_.epochs_completed);
    if (accuracy >= scenario_.target_accuracy) {
        push_event(ev.time, EventKind::training_complete);
        return;
    }
    if (epoch_rate_ > 0) {
        double next = ev.time + 1.0 / epoch_rate_;
        if (next <= scenario_.horizon) push_event(next, EventKind::epoch_complete, {}, epoch_gen_);
    }
}

void Simulation::handle_training_complete(double t) {
    if (training_done_) return;
    training_done_ = true;
    report_.training_completion_time = t;
    report_.final_accuracy = accuracy_after(scenario_.training_profile(), report_.epochs_completed);
    push_event(t, EventKind::replication_done);
}

void Simulation::handle_replication_done(double t) {
    for (auto& n : cluster_.nodes)
        if (n.alive) n.has_final_model = true;
    report_.replication_time = t;
}

void Simulation::refresh_trainer_rate(double t) {
    if (training_done_) return;
    if (epoch_rate_ > 0 && t > epoch_rate_since_)
        epoch_progress_ += (t - epoch_rate_since_) * epoch_rate_;
    if (epoch_progress_ > 1.0) epoch_progress_ = 1.0;

    const TrainingProfile& prof = scenario_.training_profile();
    double rate = 0.0;
    for (const auto& op : scenario_.app.operators) {
        if (op.kind != OpKind::trainer) continue;
        auto it = placement_.parallelism.find(op.id);
        if (it == placement_.parallelism.end()) continue;
        for (int r = 0; r < it->second; ++r) {
            auto a = placement_.assignment.find({op.id, r});
            if (a == placement_.assignment.end()) continue;
            double speedup = cluster_.node_speedup(a->second, prof.model_class);
            rate += speedup / prof.base_epoch_time;  // 1 / device_epoch_time
        }
    }
    epoch_rate_ = rate;
    epoch_rate_since_ = t;
    ++epoch_gen_;
    if (rate > 0) {
        double next = t + (1.0 - epoch_progress_) / rate;
        if (next <= scenario_.horizon) push_event(next, EventKind::epoch_complete, {}, epoch_gen_);
    }
}

void Simulation::snapshot_placement(double t) {
    report_.placements.emplace_back(t, placement_);
    record_event(t, "placement", render_placement(placement_));
}

void Simulation::record_event(double t, const std::string& kind, const std::string& detail) {
    report_.events.push_back({t, kind, detail});
}

void Simulation::abort_run(double t, const std::string& reason) {
    report_.aborted = true;
    report_.abort_reason = reason;
    record_event(t, "abort", reason);
    for (const auto& [id, st] : ops_)
        report_.totals[id] = {st.injected, st.processed, st.dropped};
    finished_ = true;
}

void Simulation::finalize() {
    if (finished_) return;
    finished_ = true;
    if (!training_done_) {
        // horizon reached: training_complete fires here with whatever accuracy
        training_done_ = true;
        report_.final_accuracy =
            accuracy_after(scenario_.training_profile(), report_.epochs_completed);
        for (auto& n : cluster_.nodes)
            if (n.alive) n.has_final_model = true;
        report_.replication_time = scenario_.horizon;
    }
    for (const auto& [id, st] : ops_)
        report_.totals[id] = {st.injected, st.processed, st.dropped};
}

MetricsReport simulate(const Scenario& scenario) {
    Simulation sim(scenario);
    sim.run();
    return sim.take_report();
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

}  // namespace

void export_metrics(const MetricsReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    {
        std::ofstream out(dir / "timeseries.csv", std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + (dir / "timeseries.csv").string());
        out << "time,input_rate,processed_rate,alive_node_count,active_node_count";
        for (const auto& id : report.op_ids)
            out << ",backlog." << id << ",parallelism." << id << ",utilization." << id;
        out << "\n";
        for (const auto& row : report.timeseries) {
            out << row.t << ',' << fmt_num(row.input_rate) << ',' << fmt_num(row.processed_rate)
                << ',' << row.alive_node_count << ',' << row.active_node_count;
            for (std::size_t i = 0; i < report.op_ids.size(); ++i)
                out << ',' << fmt_num(row.backlog[i]) << ',' << row.parallelism[i] << ','
                    << fmt_num(row.utilization[i]);
            out << "\n";
        }
    }
    {
        std::ofstream out(dir / "events.csv", std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + (dir / "events.csv").string());
        out << "time,kind,detail\n";
        for (const auto& ev : report.events)
            out << fmt_num(ev.time) << ',' << ev.kind << ',' << csv_escape(ev.detail) << "\n";
    }
    {
        std::ofstream out(dir / "summary.csv", std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + (dir / "summary.csv").string());
        out << "status,training_completion_time,final_accuracy,replication_time,"
               "total_migrations,epochs_completed,total_injected,total_processed,total_dropped\n";
        double injected = 0, processed = 0, dropped = 0;
        for (const auto& [id, t] : report.totals) {
            injected += t.injected;
            processed += t.processed;
            dropped += t.dropped;
        }
        out << (report.aborted ? "aborted" : "ok") << ','
            << fmt_num(report.training_completion_time) << ',' << fmt_num(report.final_accuracy)
            << ',' << fmt_num(report.replication_time) << ',' << report.total_migrations << ','
            << report.epochs_completed << ',' << fmt_num(injected) << ',' << fmt_num(processed)
            << ',' << fmt_num(dropped) << "\n";
    }
}

}  // namespace c2e
