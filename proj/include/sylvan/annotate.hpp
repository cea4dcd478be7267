#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "sylvan/forest.hpp"
#include "sylvan/render.hpp"

namespace sylvan {

/// COCO uncompressed RLE: alternating 0/1 run counts in column-major scan
/// order, first count is the number of leading zeros.
struct RleMask {
    int height = 0;
    int width = 0;
    std::vector<std::uint32_t> counts;

    std::uint64_t area() const;  // number of 1-pixels
};

RleMask mask_to_rle(const std::vector<std::uint8_t>& mask, int height, int width);

/// Exact inverse of mask_to_rle. Throws std::runtime_error when counts do
/// not sum to height * width.
std::vector<std::uint8_t> rle_decode(const RleMask& rle);

struct Keypoint {
    double x = 0.0, y = 0.0;
    int v = 0;  // 0 = outside image, 1 = annotated not visible, 2 = visible
};

struct Annotation {
    std::uint64_t annotation_id = 0;
    std::uint64_t image_id = 0;
    std::uint32_t instance_id = 0;
    std::array<double, 4> bbox{};  // x, y, w, h — tight bounds of the mask
    std::uint64_t area = 0;        // mask 1-pixel count
    RleMask rle;
    std::array<Keypoint, kKeypointCount> keypoints;
    int num_keypoints = 0;  // count of v > 0
    double distance_m = 0.0;
};

struct AnnotateConfig {
    double radius_m = 10.0;
    std::uint64_t min_pixels = 50;
    bool trunk_only = false;           // restrict masks to trunk pixels
    double occlusion_tolerance = 0.15; // meters; keypoint visibility slack
};

/// Projects the five 3-D keypoints of `tree` and classifies visibility
/// against the frame's depth buffer.
std::array<Keypoint, kKeypointCount> project_keypoints(const TreeInstance& tree,
                                                       const CameraPose& camera,
                                                       const std::vector<float>& depth_m,
                                                       int width, int height,
                                                       double occlusion_tolerance = 0.15);

/// One annotation per tree whose base is within radius_m of the camera and
/// whose visible pixel count is >= min_pixels. Throws std::runtime_error on
/// instance ids in the frame that are unknown to the scene.
std::vector<Annotation> extract_instances(const FrameBundle& frame,
                                          const std::vector<TreeInstance>& trees,
                                          const AnnotateConfig& config = {});

}  // namespace sylvan
