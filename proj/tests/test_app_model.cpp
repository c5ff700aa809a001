// Copyright 2026 the c2esim authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>

#include "c2e/scenario.hpp"
#include "support/helpers.hpp"

using namespace c2e;

namespace {

TrainingApp chain(std::initializer_list<std::string> ids) {
    TrainingApp app;
    std::string prev;
    for (const auto& id : ids) {
        OperatorSpec op;
        op.id = id;
        op.kind = prev.empty() ? OpKind::source : OpKind::transform;
        app.operators.push_back(op);
        if (!prev.empty()) app.edges.push_back({prev, id});
        prev = id;
    }
    if (!app.operators.empty()) app.operators.back().kind = OpKind::sink;
    std::sort(app.operators.begin(), app.operators.end(),
              [](const OperatorSpec& a, const OperatorSpec& b) { return a.id < b.id; });
    return app;
}

bool has_violation(const ValidationResult& r, const std::string& name) {
    return std::any_of(r.violations.begin(), r.violations.end(),
                       [&name](const Violation& v) { return v.invariant == name; });
}

// brute-force oracle: lexicographically smallest order over all topological
// orders, by trying ids in sorted order at each step
std::vector<std::string> smallest_topo_bruteforce(const TrainingApp& app) {
    std::vector<std::string> ids;
    for (const auto& op : app.operators) ids.push_back(op.id);
    std::sort(ids.begin(), ids.end());
    std::vector<std::string> order;
    std::set<std::string> placed;
    while (order.size() < ids.size()) {
        for (const auto& id : ids) {
            if (placed.count(id)) continue;
            bool ready = true;
            for (const auto& [from, to] : app.edges)
                if (to == id && !placed.count(from)) ready = false;
            if (ready) {
                order.push_back(id);
                placed.insert(id);
                break;
            }
        }
    }
    return order;
}

}  // namespace

TEST_CASE("validate_app accepts a plain A-B-C-D chain") {
    auto app = chain({"A", "B", "C", "D"});
    CHECK(validate_app(app).ok());
}

TEST_CASE("validate_app reports the smallest cycle exactly once") {
    TrainingApp app = chain({"A", "B"});
    app.edges.push_back({"B", "A"});
    auto r = validate_app(app);
    CHECK(!r.ok());
    CHECK(has_violation(r, "cycle"));
    CHECK(std::count_if(r.violations.begin(), r.violations.end(),
                        [](const Violation& v) { return v.invariant == "cycle"; }) == 1);
}

TEST_CASE("validate_app flags operators unreachable from any source") {
    // D is fed only by the B<->C cycle; A is the lone source
    TrainingApp app = chain({"A"});
    for (const char* id : {"B", "C", "D"}) {
        OperatorSpec op;
        op.id = id;
        op.kind = std::string(id) == "D" ? OpKind::sink : OpKind::transform;
        app.operators.push_back(op);
    }
    app.edges = {{"B", "C"}, {"C", "B"}, {"C", "D"}};
    auto r = validate_app(app);
    CHECK(has_violation(r, "cycle"));
    CHECK(has_violation(r, "unreachable"));
}

TEST_CASE("validate_app checks field invariants") {
    TrainingApp app = chain({"A", "B"});
    app.operators[0].parallelism_min = 3;
    app.operators[0].parallelism_max = 2;
    app.operators[1].selectivity = -1.0;
    app.operators[1].cost_per_tuple = 0.0;
    auto r = validate_app(app);
    CHECK(has_violation(r, "parallelism_min <= parallelism_max"));
    CHECK(has_violation(r, "selectivity >= 0"));
    CHECK(has_violation(r, "cost_per_tuple > 0"));
}

TEST_CASE("validate_app never accepts a cyclic graph (fuzz vs DFS oracle)") {
    std::mt19937_64 rng(20260810);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int cyclic_seen = 0;
    for (int trial = 0; trial < 300; ++trial) {
        // arbitrary digraph, not necessarily valid
        int n = 2 + static_cast<int>(unit(rng) * 4);
        TrainingApp app;
        for (int i = 0; i < n; ++i) {
            OperatorSpec op;
            op.id = "v" + std::to_string(i);
            op.kind = OpKind::transform;
            app.operators.push_back(op);
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j && unit(rng) < 0.25)
                    app.edges.push_back({"v" + std::to_string(i), "v" + std::to_string(j)});
        bool cyclic = c2e::testing::has_cycle_dfs(app);
        cyclic_seen += cyclic ? 1 : 0;
        auto r = validate_app(app);
        if (cyclic) CHECK(has_violation(r, "cycle"));
        else CHECK(!has_violation(r, "cycle"));
    }
    CHECK(cyclic_seen > 50);  // the fuzz actually exercised both branches
}

TEST_CASE("topo_order: chain, singleton, diamond") {
    CHECK(topo_order(chain({"A", "B", "C", "D"})) ==
          std::vector<std::string>{"A", "B", "C", "D"});
    CHECK(topo_order(chain({"only"})) == std::vector<std::string>{"only"});

    TrainingApp diamond = chain({"A"});
    for (const char* id : {"B", "C", "D"}) {
        OperatorSpec op;
        op.id = id;
        op.kind = std::string(id) == "D" ? OpKind::sink : OpKind::transform;
        diamond.operators.push_back(op);
    }
    diamond.edges = {{"A", "B"}, {"A", "C"}, {"B", "D"}, {"C", "D"}};
    auto expect = smallest_topo_bruteforce(diamond);  // derived oracle
    CHECK(expect == std::vector<std::string>{"A", "B", "C", "D"});
    CHECK(topo_order(diamond) == expect);
}

TEST_CASE("topo_order is a deterministic edge-respecting permutation") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        auto app = c2e::testing::random_app(rng, 6);
        auto order = topo_order(app);
        CHECK(order == topo_order(app));  // byte-identical on repeat
        CHECK(order.size() == app.operators.size());
        std::map<std::string, std::size_t> pos;
        for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
        CHECK(pos.size() == order.size());
        for (const auto& [from, to] : app.edges) CHECK(pos[from] < pos[to]);
        CHECK(order == smallest_topo_bruteforce(app));
    }
}

TEST_CASE("topo_order rejects an invalid app") {
    TrainingApp app = chain({"A", "B"});
    app.edges.push_back({"B", "A"});
    CHECK_THROWS_AS(topo_order(app), std::invalid_argument);
}

TEST_CASE("scenario round-trip: parse(render(s)) == s") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        Scenario s = c2e::testing::random_scenario(rng);
        Scenario back = parse_scenario(render_scenario(s));
        CHECK(back == s);
    }
}

TEST_CASE("golden fig4_placement scenario parses: 4 operators, 3 nodes, A sensitive") {
    Scenario s = parse_scenario_file(c2e::testing::scenario_path("fig4_placement.json"));
    CHECK(s.app.operators.size() == 4);
    CHECK(s.cluster.nodes.size() == 3);
    const OperatorSpec* a = s.app.find("A");
    REQUIRE(a != nullptr);
    CHECK(a->sensitivity == "d0");
    CHECK(topo_order(s.app) == std::vector<std::string>{"A", "B", "C", "D"});
    // round-trip identity on the shipped file too
    CHECK(parse_scenario(render_scenario(s)) == s);
}

TEST_CASE("empty document is a syntax error") {
    CHECK_THROWS_AS(parse_scenario(""), ScenarioError);
    try {
        parse_scenario("");
    } catch (const ScenarioError& e) {
        CHECK(e.syntax_only());
    }
}

TEST_CASE("edge to an undeclared operator names the unknown id") {
    Scenario s = parse_scenario_file(c2e::testing::scenario_path("fig4_placement.json"));
    std::string text = render_scenario(s);
    auto with_edge = apply_scenario_overrides(text, {"app.edges.0=A -> Z"});
    try {
        parse_scenario(with_edge);
        FAIL("expected ScenarioError");
    } catch (const ScenarioError& e) {
        CHECK(!e.syntax_only());
        bool named = false;
        for (const auto& i : e.issues()) named |= i.message.find("'Z'") != std::string::npos;
        CHECK(named);
    }
}

TEST_CASE("invariant violations come back with their names") {
    Scenario s = parse_scenario_file(c2e::testing::scenario_path("fig4_placement.json"));
    std::string text = render_scenario(s);
    auto bad = apply_scenario_overrides(text, {"policy.theta_down=0.9"});
    try {
        parse_scenario(bad);
        FAIL("expected ScenarioError");
    } catch (const ScenarioError& e) {
        bool named = false;
        for (const auto& i : e.issues())
            named |= i.message.find("theta_down < theta_up") != std::string::npos;
        CHECK(named);
    }
}

TEST_CASE("override paths must resolve") {
    Scenario s = parse_scenario_file(c2e::testing::scenario_path("fig4_placement.json"));
    std::string text = render_scenario(s);
    CHECK_THROWS_AS(apply_scenario_overrides(text, {"nosuch.path=1"}), ScenarioError);
    CHECK_THROWS_AS(apply_scenario_overrides(text, {"cluster.nodes.99.slots=1"}), ScenarioError);
    auto changed = apply_scenario_overrides(text, {"policy.theta_up=0.9", "seed=99"});
    Scenario s2 = parse_scenario(changed);
    CHECK(s2.policy.theta_up == doctest::Approx(0.9));
    CHECK(s2.seed == 99);
}
