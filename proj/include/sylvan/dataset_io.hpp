#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sylvan/annotate.hpp"

namespace sylvan {

struct CocoImage {
    std::uint64_t id = 0;
    std::string file_name;
    int width = 0;
    int height = 0;
};

/// COCO-format ground truth with a single "tree" category carrying the five
/// felling keypoints.
struct CocoDocument {
    std::vector<CocoImage> images;
    std::vector<Annotation> annotations;
};

inline constexpr const char* kKeypointNames[kKeypointCount] = {
    "felling_cut", "diameter_left", "diameter_right", "middle", "top"};

/// Serializes the document with fixed key order and 17-significant-digit
/// floats; byte-identical output for identical input.
std::string coco_to_json(const CocoDocument& doc);

/// Writes annotations_{split}.json into out_dir.
void export_coco(const CocoDocument& doc, const std::string& out_dir, const std::string& split_name);

CocoDocument load_coco(const std::string& path);

struct SceneEntry {
    std::uint64_t scene_seed = 0;
    int frame_count = 0;
};

struct DatasetManifest {
    std::uint64_t master_seed = 0;
    std::vector<SceneEntry> scenes;
    std::uint64_t train_frames = 0, val_frames = 0, test_frames = 0;
    int width = 800, height = 800;
    std::string generator_version;
};

std::string manifest_to_json(const DatasetManifest& manifest);
DatasetManifest load_manifest(const std::string& path);

inline constexpr int kSplitCount = 3;
inline constexpr const char* kSplitNames[kSplitCount] = {"train", "val", "test"};

/// Scene-atomic split assignment approximating 40:1:2 by greedy
/// largest-deficit placement in manifest order. Throws std::runtime_error
/// when the scenes cannot fill all three splits.
std::vector<int> split_dataset(const std::vector<SceneEntry>& scenes);

struct DetectionResult {
    std::uint64_t image_id = 0;
    double score = 0.0;
    std::optional<std::array<double, 4>> bbox;
    std::optional<RleMask> rle;
    std::optional<std::array<Keypoint, kKeypointCount>> keypoints;
};

/// Parses a COCO results file. When gt is supplied, referenced image ids
/// must exist in it. Throws std::runtime_error with entry context.
std::vector<DetectionResult> load_predictions(const std::string& path,
                                              const CocoDocument* gt = nullptr);

}  // namespace sylvan
