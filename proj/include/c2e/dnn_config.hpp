// Copyright 2026 the c2esim authors
// SPDX-License-Identifier: Apache-2.0

#ifndef C2E_DNN_CONFIG_HPP
#define C2E_DNN_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include "c2e/app_model.hpp"
#include "c2e/scenario.hpp"

namespace c2e::dnn {

enum class SampleKind { image, lidar_points, gps_sequence, log_trace };
enum class LabelKind { class_label, bbox2d, segmentation_mask, sequence_label };

std::string to_string(SampleKind k);
std::string to_string(LabelKind k);

struct SampleType {
    SampleKind kind = SampleKind::image;
    // image: h, w, channels; lidar_points: dims; sequences: len, features
    int h = 0, w = 0, channels = 0;
    int dims = 0;
    int len = 0, features = 0;

    bool operator==(const SampleType&) const = default;
};

struct LabelType {
    LabelKind kind = LabelKind::class_label;
    int n_classes = 1;

    bool operator==(const LabelType&) const = default;
};

struct Partition {
    std::string shard;
    std::string node;  // node id where the shard is produced

    bool operator==(const Partition&) const = default;
};

struct DataDescriptor {
    SampleType sample_type;
    LabelType label_type;
    long n_samples = 1;
    std::string sensitive_dataset;  // empty = not sensitive
    std::vector<Partition> partitions;

    bool operator==(const DataDescriptor&) const = default;
};

enum class Backbone { none, VGG16, MobileNetV2, Darknet };
enum class Head { YoloV5, YoloV4, YoloV3, RetinaNet, SSD, SoftmaxClassifier, LSTMSequence };
enum class CapacityClass { light, heavy };

std::string to_string(Backbone b);
std::string to_string(Head h);
std::string to_string(CapacityClass c);

struct ArchSpec {
    std::vector<int> input_shape;
    std::vector<int> output_shape;
    Backbone backbone = Backbone::none;
    Head head = Head::SoftmaxClassifier;
    CapacityClass capacity_class = CapacityClass::light;

    bool operator==(const ArchSpec&) const = default;
};

struct ShapeResult {
    std::vector<int> input_shape;
    std::vector<int> output_shape;
};

/// Thrown by shape inference / suggestion on declared-unsupported
/// sample/label combinations; names the pair.
class UnsupportedDescriptor : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// bbox2d tensor layout (single-scale Yolo-style): grid x grid x anchors x (5 + classes)
inline constexpr int kBoxGrid = 13;
inline constexpr int kBoxAnchors = 3;

// light/heavy boundary on training-set size
inline constexpr long kCapacitySampleThreshold = 10000;

/// Deterministic shape inference; total over the supported descriptor grid,
/// throws UnsupportedDescriptor elsewhere.
ShapeResult infer_io_shapes(const DataDescriptor& d);

bool supported_combination(SampleKind s, LabelKind l);

CapacityClass capacity_class(long n_samples, long threshold = kCapacitySampleThreshold);

/// Non-empty, deterministically ordered, head always compatible with the
/// label type. Throws UnsupportedDescriptor when no architecture fits.
std::vector<ArchSpec> suggest_architectures(const DataDescriptor& d);

/// Emits the training DAG: one source+preprocess operator with
/// parallelism = shard count, a trainer, and the engine-producing sink.
/// Throws std::invalid_argument on a descriptor without partitions.
TrainingApp generate_training_dag(const ArchSpec& arch, const DataDescriptor& d);

/// Parses a descriptor document (JSON). Throws ScenarioError on bad input.
DataDescriptor parse_descriptor(const std::string& text);

/// Complete runnable scenario around the generated app (cluster derived
/// from the descriptor partitions); lets `config --emit-app | run -` compose.
Scenario emit_scenario(const ArchSpec& arch, const DataDescriptor& d);

}  // namespace c2e::dnn

#endif  // C2E_DNN_CONFIG_HPP
