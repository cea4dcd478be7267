#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sylvan/dataset_io.hpp"

namespace sylvan {

enum class EvalTask { BBOX = 0, MASK = 1, KEYPOINTS = 2 };

const char* task_name(EvalTask task);

/// Intersection over union of two (x, y, w, h) boxes; 0 when the union is
/// empty.
double iou_bbox(const std::array<double, 4>& a, const std::array<double, 4>& b);

/// Mask IoU computed directly on the run-length intervals, no decode.
/// Throws std::domain_error on canvas size mismatch.
double iou_mask(const RleMask& a, const RleMask& b);

/// Object keypoint similarity: mean over gt keypoints with v > 0 of
/// exp(-d^2 / (2 s^2 k^2)), s = sqrt(gt_area), k = 0.05 for all keypoints.
double oks(const std::array<Keypoint, kKeypointCount>& pred,
           const std::array<Keypoint, kKeypointCount>& gt, double gt_area, double k_const = 0.05);

inline constexpr int kMaxDetectionsPerImage = 100;

/// Per-image COCO greedy matching: predictions in descending-score order
/// (ties by insertion), each matched to the unmatched gt with the highest
/// kernel value >= threshold. Returns the gt index per prediction, -1 for
/// false positives. Indices follow the input vectors.
std::vector<int> match_and_score(const std::vector<DetectionResult>& preds,
                                 const std::vector<Annotation>& gts, EvalTask task,
                                 double threshold, double oks_k = 0.05);

struct ApResult {
    bool defined = false;  // false when no gt instances exist for the task
    double ap = 0.0;       // mean over IoU/OKS thresholds 0.50:0.05:0.95, percent
    double ap50 = 0.0;     // threshold 0.50 alone, percent
};

/// Full COCO-style AP over a ground-truth document and detections.
ApResult evaluate_ap(const std::vector<DetectionResult>& preds, const CocoDocument& gt, EvalTask task,
                     double oks_k = 0.05);

inline constexpr int kHistRange = 50;         // bins cover [-50, 50] px
inline constexpr int kHistBins = 2 * kHistRange;

struct PerKeypointStats {
    std::uint64_t count = 0;
    double mean_dx = 0.0, mean_dy = 0.0;
    double sigma_x = 0.0, sigma_y = 0.0;  // population standard deviations
    double mean_euclidean = 0.0;
    std::vector<std::uint32_t> density;   // kHistBins x kHistBins, row-major in dy
};

struct KeypointStats {
    bool empty = true;
    std::uint64_t matched_instances = 0;
    std::array<PerKeypointStats, kKeypointCount> per_keypoint;
    double diameter_error_mean = 0.0;  // | |R-L|_pred - |R-L|_gt | in px
    std::uint64_t diameter_samples = 0;
};

/// Pixel-error statistics over instances matched with the bbox kernel at
/// IoU 0.5, so keypoint errors are not conditioned on OKS.
KeypointStats keypoint_error_stats(const std::vector<DetectionResult>& preds, const CocoDocument& gt);

struct EvalReport {
    std::array<ApResult, 3> ap;  // indexed by EvalTask
    KeypointStats keypoint_stats;
};

std::string report_to_json(const EvalReport& report);
std::string report_to_text(const EvalReport& report);
std::string density_to_csv(const KeypointStats& stats);

}  // namespace sylvan
