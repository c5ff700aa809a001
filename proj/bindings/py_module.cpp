// Copyright 2026 the c2esim authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "c2e/dnn_config.hpp"
#include "c2e/placer.hpp"
#include "c2e/scenario.hpp"
#include "c2e/simengine.hpp"

namespace py = pybind11;
using namespace c2e;

namespace {

py::dict timeseries_dict(const MetricsReport& r) {
    py::dict out;
    std::vector<long> time;
    std::vector<double> input_rate, processed_rate;
    std::vector<long> alive, active;
    for (const auto& row : r.timeseries) {
        time.push_back(row.t);
        input_rate.push_back(row.input_rate);
        processed_rate.push_back(row.processed_rate);
        alive.push_back(row.alive_node_count);
        active.push_back(row.active_node_count);
    }
    out["time"] = time;
    out["input_rate"] = input_rate;
    out["processed_rate"] = processed_rate;
    out["alive_node_count"] = alive;
    out["active_node_count"] = active;
    py::dict backlog, parallelism, utilization;
    for (std::size_t i = 0; i < r.op_ids.size(); ++i) {
        std::vector<double> b, u;
        std::vector<int> p;
        for (const auto& row : r.timeseries) {
            b.push_back(row.backlog[i]);
            p.push_back(row.parallelism[i]);
            u.push_back(row.utilization[i]);
        }
        backlog[py::str(r.op_ids[i])] = b;
        parallelism[py::str(r.op_ids[i])] = p;
        utilization[py::str(r.op_ids[i])] = u;
    }
    out["backlog"] = backlog;
    out["parallelism"] = parallelism;
    out["utilization"] = utilization;
    return out;
}

py::list arch_list(const std::vector<dnn::ArchSpec>& archs) {
    py::list out;
    for (const auto& a : archs) {
        py::dict d;
        d["backbone"] = dnn::to_string(a.backbone);
        d["head"] = dnn::to_string(a.head);
        d["capacity_class"] = dnn::to_string(a.capacity_class);
        d["input_shape"] = a.input_shape;
        d["output_shape"] = a.output_shape;
        out.append(d);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Cloud2Edge elastic training simulator";

    py::register_exception<ScenarioError>(m, "ScenarioError");
    py::register_exception<dnn::UnsupportedDescriptor>(m, "UnsupportedDescriptor");

    py::class_<Scenario>(m, "Scenario")
        .def_property_readonly("seed", [](const Scenario& s) { return s.seed; })
        .def_property_readonly("horizon", [](const Scenario& s) { return s.horizon; })
        .def_property_readonly("target_accuracy",
                               [](const Scenario& s) { return s.target_accuracy; })
        .def_property_readonly("operator_ids",
                               [](const Scenario& s) {
                                   std::vector<std::string> ids;
                                   for (const auto& op : s.app.operators) ids.push_back(op.id);
                                   return ids;
                               })
        .def_property_readonly("node_ids",
                               [](const Scenario& s) {
                                   std::vector<std::string> ids;
                                   for (const auto& n : s.cluster.nodes) ids.push_back(n.id);
                                   return ids;
                               })
        .def("render", &render_scenario)
        .def("__eq__", [](const Scenario& a, const Scenario& b) { return a == b; });

    py::class_<MetricsReport>(m, "MetricsReport")
        .def_readonly("training_completion_time", &MetricsReport::training_completion_time)
        .def_readonly("final_accuracy", &MetricsReport::final_accuracy)
        .def_readonly("replication_time", &MetricsReport::replication_time)
        .def_readonly("total_migrations", &MetricsReport::total_migrations)
        .def_readonly("epochs_completed", &MetricsReport::epochs_completed)
        .def_readonly("aborted", &MetricsReport::aborted)
        .def_readonly("abort_reason", &MetricsReport::abort_reason)
        .def_readonly("epoch_times", &MetricsReport::epoch_times)
        .def_readonly("op_ids", &MetricsReport::op_ids)
        .def("timeseries", &timeseries_dict)
        .def("events",
             [](const MetricsReport& r) {
                 py::list out;
                 for (const auto& ev : r.events)
                     out.append(py::make_tuple(ev.time, ev.kind, ev.detail));
                 return out;
             })
        .def("export", [](const MetricsReport& r, const std::filesystem::path& dir) {
            export_metrics(r, dir);
        });

    m.def("parse_scenario", &parse_scenario, py::arg("text"),
          "Parse and validate a scenario document");
    m.def("parse_scenario_file", &parse_scenario_file, py::arg("path"));
    m.def("render_scenario", &render_scenario, py::arg("scenario"));
    m.def("apply_overrides", &apply_scenario_overrides, py::arg("text"), py::arg("overrides"),
          "Apply dotted-path key=value overrides to a scenario document");
    m.def("validate_scenario",
          [](const std::string& text) {
              py::list issues;
              try {
                  parse_scenario(text);
              } catch (const ScenarioError& e) {
                  for (const auto& i : e.issues()) issues.append(i.message);
              }
              return issues;
          },
          py::arg("text"), "Return a list of violation messages (empty when valid)");
    m.def("simulate", [](const Scenario& s) { return simulate(s); }, py::arg("scenario"),
          py::call_guard<py::gil_scoped_release>());
    m.def("accuracy_after",
          [](const std::string& model_class, long epochs) {
              auto mc = model_class_from_string(model_class);
              if (!mc) throw std::invalid_argument("unknown model class '" + model_class + "'");
              return accuracy_after(default_training_profile(*mc), epochs);
          },
          py::arg("model_class"), py::arg("epochs"));
    m.def("suggest_architectures",
          [](const std::string& descriptor_json) {
              return arch_list(dnn::suggest_architectures(dnn::parse_descriptor(descriptor_json)));
          },
          py::arg("descriptor_json"));
    m.def("generate_scenario",
          [](const std::string& descriptor_json) {
              auto d = dnn::parse_descriptor(descriptor_json);
              auto archs = dnn::suggest_architectures(d);
              return render_scenario(dnn::emit_scenario(archs.front(), d));
          },
          py::arg("descriptor_json"),
          "Generate a runnable scenario document from a data descriptor");
}
