// Copyright 2026 the c2esim authors
// SPDX-License-Identifier: Apache-2.0

#include "c2e/dnn_config.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace c2e::dnn {

using nlohmann::json;

std::string to_string(SampleKind k) {
    switch (k) {
        case SampleKind::image: return "image";
        case SampleKind::lidar_points: return "lidar_points";
        case SampleKind::gps_sequence: return "gps_sequence";
        case SampleKind::log_trace: return "log_trace";
    }
    return "image";
}

std::string to_string(LabelKind k) {
    switch (k) {
        case LabelKind::class_label: return "class_label";
        case LabelKind::bbox2d: return "bbox2d";
        case LabelKind::segmentation_mask: return "segmentation_mask";
        case LabelKind::sequence_label: return "sequence_label";
    }
    return "class_label";
}

std::string to_string(Backbone b) {
    switch (b) {
        case Backbone::none: return "none";
        case Backbone::VGG16: return "VGG16";
        case Backbone::MobileNetV2: return "MobileNetV2";
        case Backbone::Darknet: return "Darknet";
    }
    return "none";
}

std::string to_string(Head h) {
    switch (h) {
        case Head::YoloV5: return "YoloV5";
        case Head::YoloV4: return "YoloV4";
        case Head::YoloV3: return "YoloV3";
        case Head::RetinaNet: return "RetinaNet";
        case Head::SSD: return "SSD";
        case Head::SoftmaxClassifier: return "SoftmaxClassifier";
        case Head::LSTMSequence: return "LSTMSequence";
    }
    return "SoftmaxClassifier";
}

std::string to_string(CapacityClass c) {
    return c == CapacityClass::light ? "light" : "heavy";
}

bool supported_combination(SampleKind s, LabelKind l) {
    switch (s) {
        case SampleKind::image:
            return l == LabelKind::class_label || l == LabelKind::bbox2d ||
                   l == LabelKind::segmentation_mask;
        case SampleKind::lidar_points:
            return l == LabelKind::class_label;
        case SampleKind::gps_sequence:
        case SampleKind::log_trace:
            return l == LabelKind::class_label || l == LabelKind::sequence_label;
    }
    return false;
}

namespace {

[[noreturn]] void unsupported(SampleKind s, LabelKind l) {
    throw UnsupportedDescriptor("unsupported combination: " + to_string(s) + " + " + to_string(l));
}

}  // namespace

ShapeResult infer_io_shapes(const DataDescriptor& d) {
    const SampleKind s = d.sample_type.kind;
    const LabelKind l = d.label_type.kind;
    if (!supported_combination(s, l)) unsupported(s, l);

    ShapeResult res;
    switch (s) {
        case SampleKind::image:
            res.input_shape = {d.sample_type.h, d.sample_type.w, d.sample_type.channels};
            break;
        case SampleKind::lidar_points:
            res.input_shape = {d.sample_type.dims};
            break;
        case SampleKind::gps_sequence:
        case SampleKind::log_trace:
            res.input_shape = {d.sample_type.len, d.sample_type.features};
            break;
    }
    switch (l) {
        case LabelKind::class_label:
        case LabelKind::sequence_label:
            res.output_shape = {d.label_type.n_classes};
            break;
        case LabelKind::bbox2d:
            res.output_shape = {kBoxGrid, kBoxGrid, kBoxAnchors, 5 + d.label_type.n_classes};
            break;
        case LabelKind::segmentation_mask:
            res.output_shape = {d.sample_type.h, d.sample_type.w, d.label_type.n_classes};
            break;
    }
    return res;
}

CapacityClass capacity_class(long n_samples, long threshold) {
    if (n_samples < 1) throw std::invalid_argument("capacity_class: n_samples >= 1 violated");
    return n_samples < threshold ? CapacityClass::light : CapacityClass::heavy;
}

std::vector<ArchSpec> suggest_architectures(const DataDescriptor& d) {
    ShapeResult shapes = infer_io_shapes(d);
    CapacityClass cap = capacity_class(d.n_samples);

    const std::vector<Backbone> conv_backbones =
        cap == CapacityClass::light
            ? std::vector<Backbone>{Backbone::VGG16, Backbone::MobileNetV2, Backbone::Darknet}
            : std::vector<Backbone>{Backbone::Darknet, Backbone::MobileNetV2, Backbone::VGG16};
    const std::vector<Head> box_heads = {Head::YoloV5, Head::YoloV4, Head::YoloV3, Head::RetinaNet,
                                         Head::SSD};

    std::vector<ArchSpec> out;
    auto add = [&](Backbone b, Head h) {
        out.push_back(ArchSpec{shapes.input_shape, shapes.output_shape, b, h, cap});
    };

    const SampleKind s = d.sample_type.kind;
    switch (d.label_type.kind) {
        case LabelKind::bbox2d:
            for (Backbone b : conv_backbones)
                for (Head h : box_heads) add(b, h);
            break;
        case LabelKind::class_label:
            if (s == SampleKind::image || s == SampleKind::lidar_points) {
                for (Backbone b : conv_backbones) add(b, Head::SoftmaxClassifier);
            } else {
                add(Backbone::none, Head::SoftmaxClassifier);
            }
            break;
        case LabelKind::sequence_label:
            add(Backbone::none, Head::LSTMSequence);
            break;
        case LabelKind::segmentation_mask:
            throw UnsupportedDescriptor(
                "no compatible architecture for " + to_string(s) + " + segmentation_mask");
    }
    if (out.empty())
        throw UnsupportedDescriptor("no compatible architecture for " + to_string(s) + " + " +
                                    to_string(d.label_type.kind));
    return out;
}

TrainingApp generate_training_dag(const ArchSpec& arch, const DataDescriptor& d) {
    if (d.partitions.empty())
        throw std::invalid_argument("generate_training_dag: descriptor without partitions");

    const bool heavy = arch.capacity_class == CapacityClass::heavy;
    const int shards = static_cast<int>(d.partitions.size());

    TrainingApp app;
    app.model_class = arch.backbone == Backbone::none ? ModelClass::MLP : ModelClass::CNN;

    OperatorSpec ingest;
    ingest.id = "ingest";
    ingest.kind = OpKind::source;
    ingest.sensitivity = d.sensitive_dataset;
    ingest.selectivity = 1.0;
    ingest.cost_per_tuple = heavy ? 0.5 : 0.2;  // preprocess on the shard
    ingest.parallelism_min = shards;
    ingest.parallelism_max = shards;
    ingest.state_size = 1.0;

    OperatorSpec train;
    train.id = "train";
    train.kind = OpKind::trainer;
    train.selectivity = 0.01;  // model updates, not raw tuples
    train.cost_per_tuple = heavy ? 4.0 : 1.0;
    train.parallelism_min = 1;
    train.parallelism_max = std::max(8, 2 * shards);
    train.state_size = heavy ? 40.0 : 10.0;

    OperatorSpec engine;
    engine.id = "engine";
    engine.kind = OpKind::sink;
    engine.selectivity = 1.0;
    engine.cost_per_tuple = 0.05;
    engine.parallelism_min = 1;
    engine.parallelism_max = 1;
    engine.state_size = 1.0;

    app.operators = {std::move(engine), std::move(ingest), std::move(train)};
    std::sort(app.operators.begin(), app.operators.end(),
              [](const OperatorSpec& a, const OperatorSpec& b) { return a.id < b.id; });
    app.edges = {{"ingest", "train"}, {"train", "engine"}};
    std::sort(app.edges.begin(), app.edges.end());
    return app;
}

DataDescriptor parse_descriptor(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError({ParseIssue{ParseIssue::Kind::syntax, "descriptor", e.what()}});
    }
    if (!doc.is_object())
        throw ScenarioError(
            {ParseIssue{ParseIssue::Kind::syntax, "descriptor", "expected a JSON object"}});

    auto fail = [](const std::string& where, const std::string& msg) -> void {
        throw ScenarioError({ParseIssue{ParseIssue::Kind::syntax, where, msg}});
    };

    DataDescriptor d;
    if (!doc.contains("sample_type") || !doc["sample_type"].is_object())
        fail("sample_type", "missing or not an object");
    const json& st = doc["sample_type"];
    std::string skind = st.value("kind", "");
    if (skind == "image") {
        d.sample_type.kind = SampleKind::image;
        d.sample_type.h = st.value("h", 0);
        d.sample_type.w = st.value("w", 0);
        d.sample_type.channels = st.value("channels", 0);
        if (d.sample_type.h < 1 || d.sample_type.w < 1 || d.sample_type.channels < 1)
            fail("sample_type", "image requires positive h, w, channels");
    } else if (skind == "lidar_points") {
        d.sample_type.kind = SampleKind::lidar_points;
        d.sample_type.dims = st.value("dims", 0);
        if (d.sample_type.dims < 1) fail("sample_type", "lidar_points requires positive dims");
    } else if (skind == "gps_sequence" || skind == "log_trace") {
        d.sample_type.kind =
            skind == "gps_sequence" ? SampleKind::gps_sequence : SampleKind::log_trace;
        d.sample_type.len = st.value("len", 0);
        d.sample_type.features = st.value("features", 0);
        if (d.sample_type.len < 1 || d.sample_type.features < 1)
            fail("sample_type", skind + " requires positive len, features");
    } else {
        fail("sample_type.kind", "unknown sample kind '" + skind + "'");
    }

    if (!doc.contains("label_type") || !doc["label_type"].is_object())
        fail("label_type", "missing or not an object");
    const json& lt = doc["label_type"];
    std::string lkind = lt.value("kind", "");
    if (lkind == "class_label") d.label_type.kind = LabelKind::class_label;
    else if (lkind == "bbox2d") d.label_type.kind = LabelKind::bbox2d;
    else if (lkind == "segmentation_mask") d.label_type.kind = LabelKind::segmentation_mask;
    else if (lkind == "sequence_label") d.label_type.kind = LabelKind::sequence_label;
    else fail("label_type.kind", "unknown label kind '" + lkind + "'");
    d.label_type.n_classes = lt.value("n_classes", 1);
    if (d.label_type.n_classes < 1) fail("label_type.n_classes", "must be >= 1");

    if (!doc.contains("n_samples") || !doc["n_samples"].is_number_integer())
        fail("n_samples", "missing or not an integer");
    d.n_samples = doc["n_samples"].get<long>();
    if (d.n_samples < 1)
        throw ScenarioError(
            {ParseIssue{ParseIssue::Kind::invariant, "n_samples", "n_samples >= 1"}});

    if (doc.contains("sensitive_dataset"))
        d.sensitive_dataset = doc["sensitive_dataset"].get<std::string>();

    if (doc.contains("partitions")) {
        if (!doc["partitions"].is_array()) fail("partitions", "expected an array");
        for (const auto& pj : doc["partitions"]) {
            Partition p;
            p.shard = pj.value("shard", "");
            p.node = pj.value("node", "");
            if (p.shard.empty() || p.node.empty())
                fail("partitions", "each partition needs 'shard' and 'node'");
            d.partitions.push_back(std::move(p));
        }
    }
    return d;
}

Scenario emit_scenario(const ArchSpec& arch, const DataDescriptor& d) {
    Scenario s;
    s.app = generate_training_dag(arch, d);

    std::set<std::string> shard_nodes;
    for (const auto& p : d.partitions) shard_nodes.insert(p.node);
    for (const auto& id : shard_nodes) {
        NodeSpec n;
        n.id = id;
        n.tier = Tier::edge;
        n.device = "reference-CPU";
        n.slots = 2;
        if (!d.sensitive_dataset.empty()) n.hosted_datasets.insert(d.sensitive_dataset);
        s.cluster.nodes.push_back(std::move(n));
    }
    if (!shard_nodes.count("cloud0")) {
        NodeSpec cloud;
        cloud.id = "cloud0";
        cloud.tier = Tier::cloud;
        cloud.device = "reference-CPU";
        cloud.slots = 8;
        s.cluster.nodes.push_back(std::move(cloud));
    }
    std::sort(s.cluster.nodes.begin(), s.cluster.nodes.end(),
              [](const NodeSpec& a, const NodeSpec& b) { return a.id < b.id; });
    s.cluster.pool_max = static_cast<int>(s.cluster.nodes.size());
    s.cluster.profiles = default_device_profiles();
    s.training = {{ModelClass::MLP, default_training_profile(ModelClass::MLP)},
                  {ModelClass::CNN, default_training_profile(ModelClass::CNN)}};
    s.trace.breakpoints = {{0.0, 100.0}};
    s.seed = 0;
    s.horizon = 600.0;
    return s;
}

}  // namespace c2e::dnn
