#include "sylvan/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "sylvan/json_writer.hpp"

namespace sylvan {

const char* task_name(EvalTask task) {
    switch (task) {
        case EvalTask::BBOX: return "bbox";
        case EvalTask::MASK: return "segm";
        case EvalTask::KEYPOINTS: return "keypoints";
    }
    return "?";
}

double iou_bbox(const std::array<double, 4>& a, const std::array<double, 4>& b) {
    double ix = std::max(0.0, std::min(a[0] + a[2], b[0] + b[2]) - std::max(a[0], b[0]));
    double iy = std::max(0.0, std::min(a[1] + a[3], b[1] + b[3]) - std::max(a[1], b[1]));
    double inter = ix * iy;
    double uni = a[2] * a[3] + b[2] * b[3] - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

namespace {

// 1-run intervals [start, end) in the column-major linear index space.
std::vector<std::pair<std::uint64_t, std::uint64_t>> rle_intervals(const RleMask& rle) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    std::uint64_t pos = 0;
    bool ones = false;
    for (std::uint32_t c : rle.counts) {
        if (ones && c > 0) out.emplace_back(pos, pos + c);
        pos += c;
        ones = !ones;
    }
    return out;
}

}  // namespace

double iou_mask(const RleMask& a, const RleMask& b) {
    if (a.height != b.height || a.width != b.width)
        throw std::domain_error("iou_mask: canvas size mismatch");
    auto ia = rle_intervals(a);
    auto ib = rle_intervals(b);

    std::uint64_t inter = 0, area_a = 0, area_b = 0;
    for (const auto& r : ia) area_a += r.second - r.first;
    for (const auto& r : ib) area_b += r.second - r.first;

    std::size_t i = 0, j = 0;
    while (i < ia.size() && j < ib.size()) {
        std::uint64_t lo = std::max(ia[i].first, ib[j].first);
        std::uint64_t hi = std::min(ia[i].second, ib[j].second);
        if (hi > lo) inter += hi - lo;
        if (ia[i].second < ib[j].second)
            ++i;
        else
            ++j;
    }
    std::uint64_t uni = area_a + area_b - inter;
    return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

double oks(const std::array<Keypoint, kKeypointCount>& pred,
           const std::array<Keypoint, kKeypointCount>& gt, double gt_area, double k_const) {
    double s2 = gt_area;  // s = sqrt(area), so s^2 = area
    double sum = 0.0;
    int n = 0;
    for (int k = 0; k < kKeypointCount; ++k) {
        if (gt[k].v <= 0) continue;
        double dx = pred[k].x - gt[k].x;
        double dy = pred[k].y - gt[k].y;
        double d2 = dx * dx + dy * dy;
        sum += std::exp(-d2 / (2.0 * s2 * k_const * k_const));
        ++n;
    }
    if (n == 0) throw std::domain_error("oks: ground truth has no visible keypoints");
    return sum / n;
}

namespace {

bool gt_usable(const Annotation& gt, EvalTask task) {
    if (task != EvalTask::KEYPOINTS) return true;
    for (const Keypoint& kp : gt.keypoints)
        if (kp.v > 0) return true;
    return false;  // excluded from keypoint evaluation
}

double kernel_value(const DetectionResult& pred, const Annotation& gt, EvalTask task, double oks_k) {
    switch (task) {
        case EvalTask::BBOX:
            return pred.bbox ? iou_bbox(*pred.bbox, gt.bbox) : 0.0;
        case EvalTask::MASK:
            return pred.rle ? iou_mask(*pred.rle, gt.rle) : 0.0;
        case EvalTask::KEYPOINTS:
            return pred.keypoints ? oks(*pred.keypoints, gt.keypoints,
                                        static_cast<double>(gt.area), oks_k)
                                  : 0.0;
    }
    return 0.0;
}

// Prediction indices in match order: descending score, ties by insertion,
// truncated at maxDets.
std::vector<std::size_t> match_order(const std::vector<DetectionResult>& preds) {
    std::vector<std::size_t> order(preds.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return preds[a].score > preds[b].score; });
    if (order.size() > kMaxDetectionsPerImage) order.resize(kMaxDetectionsPerImage);
    return order;
}

}  // namespace

std::vector<int> match_and_score(const std::vector<DetectionResult>& preds,
                                 const std::vector<Annotation>& gts, EvalTask task,
                                 double threshold, double oks_k) {
    std::vector<int> pred_to_gt(preds.size(), -1);
    std::vector<bool> gt_taken(gts.size(), false);

    for (std::size_t p : match_order(preds)) {
        int best = -1;
        double best_val = threshold;
        for (std::size_t g = 0; g < gts.size(); ++g) {
            if (gt_taken[g] || !gt_usable(gts[g], task)) continue;
            double v = kernel_value(preds[p], gts[g], task, oks_k);
            if (v >= best_val && (best < 0 || v > best_val)) {
                best = static_cast<int>(g);
                best_val = v;
            }
        }
        if (best >= 0) {
            pred_to_gt[p] = best;
            gt_taken[best] = true;
        }
    }
    return pred_to_gt;
}

namespace {

struct ScoredFlag {
    double score;
    std::uint64_t image_id;
    std::size_t index;  // insertion index within its image
    bool tp;
};

// 101-point interpolated AP, in percent.
double ap_from_flags(std::vector<ScoredFlag> flags, std::uint64_t n_gt) {
    std::sort(flags.begin(), flags.end(), [](const ScoredFlag& a, const ScoredFlag& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.image_id != b.image_id) return a.image_id < b.image_id;
        return a.index < b.index;
    });

    std::vector<double> precision(flags.size()), recall(flags.size());
    std::uint64_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        flags[i].tp ? ++tp : ++fp;
        precision[i] = static_cast<double>(tp) / static_cast<double>(tp + fp);
        recall[i] = static_cast<double>(tp) / static_cast<double>(n_gt);
    }
    // Make precision monotonically non-increasing from the right.
    for (std::size_t i = precision.size(); i-- > 1;)
        precision[i - 1] = std::max(precision[i - 1], precision[i]);

    double sum = 0.0;
    std::size_t ptr = 0;
    for (int r = 0; r <= 100; ++r) {
        double target = r / 100.0;
        while (ptr < recall.size() && recall[ptr] < target) ++ptr;
        if (ptr < precision.size()) sum += precision[ptr];
    }
    return 100.0 * sum / 101.0;
}

}  // namespace

ApResult evaluate_ap(const std::vector<DetectionResult>& preds, const CocoDocument& gt, EvalTask task,
                     double oks_k) {
    // Group per image, preserving insertion order.
    std::map<std::uint64_t, std::vector<Annotation>> gt_by_image;
    for (const Annotation& ann : gt.annotations)
        if (gt_usable(ann, task)) gt_by_image[ann.image_id].push_back(ann);
    std::map<std::uint64_t, std::vector<DetectionResult>> pred_by_image;
    for (const DetectionResult& det : preds) pred_by_image[det.image_id].push_back(det);

    std::uint64_t n_gt = 0;
    for (const auto& [id, anns] : gt_by_image) n_gt += anns.size();

    ApResult result;
    if (n_gt == 0) return result;
    result.defined = true;

    double ap_sum = 0.0;
    for (int t = 0; t < 10; ++t) {
        double threshold = 0.50 + 0.05 * t;
        std::vector<ScoredFlag> flags;
        for (const auto& [image_id, image_preds] : pred_by_image) {
            auto git = gt_by_image.find(image_id);
            static const std::vector<Annotation> empty;
            const std::vector<Annotation>& image_gts = git != gt_by_image.end() ? git->second : empty;
            std::vector<int> matches = match_and_score(image_preds, image_gts, task, threshold, oks_k);
            auto order = match_order(image_preds);
            for (std::size_t p : order)
                flags.push_back({image_preds[p].score, image_id, p, matches[p] >= 0});
        }
        double ap = ap_from_flags(std::move(flags), n_gt);
        ap_sum += ap;
        if (t == 0) result.ap50 = ap;
    }
    result.ap = ap_sum / 10.0;
    return result;
}

KeypointStats keypoint_error_stats(const std::vector<DetectionResult>& preds, const CocoDocument& gt) {
    KeypointStats stats;
    for (auto& pk : stats.per_keypoint)
        pk.density.assign(static_cast<std::size_t>(kHistBins) * kHistBins, 0);

    std::map<std::uint64_t, std::vector<Annotation>> gt_by_image;
    for (const Annotation& ann : gt.annotations) gt_by_image[ann.image_id].push_back(ann);
    std::map<std::uint64_t, std::vector<DetectionResult>> pred_by_image;
    for (const DetectionResult& det : preds)
        if (det.keypoints) pred_by_image[det.image_id].push_back(det);

    std::array<std::vector<double>, kKeypointCount> dxs, dys;
    std::vector<double> diameter_errors;

    for (const auto& [image_id, image_preds] : pred_by_image) {
        auto git = gt_by_image.find(image_id);
        if (git == gt_by_image.end()) continue;
        std::vector<int> matches = match_and_score(image_preds, git->second, EvalTask::BBOX, 0.5);
        for (std::size_t p = 0; p < image_preds.size(); ++p) {
            if (matches[p] < 0) continue;
            const Annotation& g = git->second[matches[p]];
            const auto& pk = *image_preds[p].keypoints;
            ++stats.matched_instances;
            for (int k = 0; k < kKeypointCount; ++k) {
                if (g.keypoints[k].v <= 0) continue;
                double dx = pk[k].x - g.keypoints[k].x;
                double dy = pk[k].y - g.keypoints[k].y;
                dxs[k].push_back(dx);
                dys[k].push_back(dy);
                int bx = std::clamp(static_cast<int>(std::floor(dx)) + kHistRange, 0, kHistBins - 1);
                int by = std::clamp(static_cast<int>(std::floor(dy)) + kHistRange, 0, kHistBins - 1);
                ++stats.per_keypoint[k].density[static_cast<std::size_t>(by) * kHistBins + bx];
            }
            if (g.keypoints[KP_DIAMETER_LEFT].v > 0 && g.keypoints[KP_DIAMETER_RIGHT].v > 0) {
                auto dist = [](const Keypoint& a, const Keypoint& b) {
                    return std::hypot(a.x - b.x, a.y - b.y);
                };
                double dp = dist(pk[KP_DIAMETER_RIGHT], pk[KP_DIAMETER_LEFT]);
                double dg = dist(g.keypoints[KP_DIAMETER_RIGHT], g.keypoints[KP_DIAMETER_LEFT]);
                diameter_errors.push_back(std::abs(dp - dg));
            }
        }
    }

    for (int k = 0; k < kKeypointCount; ++k) {
        PerKeypointStats& pk = stats.per_keypoint[k];
        pk.count = dxs[k].size();
        if (pk.count == 0) continue;
        stats.empty = false;
        double n = static_cast<double>(pk.count);
        double sx = 0, sy = 0, se = 0;
        for (std::size_t i = 0; i < dxs[k].size(); ++i) {
            sx += dxs[k][i];
            sy += dys[k][i];
            se += std::hypot(dxs[k][i], dys[k][i]);
        }
        pk.mean_dx = sx / n;
        pk.mean_dy = sy / n;
        pk.mean_euclidean = se / n;
        double vx = 0, vy = 0;
        for (std::size_t i = 0; i < dxs[k].size(); ++i) {
            vx += (dxs[k][i] - pk.mean_dx) * (dxs[k][i] - pk.mean_dx);
            vy += (dys[k][i] - pk.mean_dy) * (dys[k][i] - pk.mean_dy);
        }
        pk.sigma_x = std::sqrt(vx / n);
        pk.sigma_y = std::sqrt(vy / n);
    }
    if (!diameter_errors.empty()) {
        stats.diameter_samples = diameter_errors.size();
        stats.diameter_error_mean =
            std::accumulate(diameter_errors.begin(), diameter_errors.end(), 0.0) /
            static_cast<double>(diameter_errors.size());
    }
    return stats;
}

std::string report_to_json(const EvalReport& report) {
    JsonWriter w;
    w.begin_object();
    w.key("ap");
    w.begin_object();
    for (int t = 0; t < 3; ++t) {
        w.key(task_name(static_cast<EvalTask>(t)));
        w.begin_object();
        w.key("defined"); w.value(report.ap[t].defined);
        w.key("AP"); w.value(report.ap[t].ap);
        w.key("AP50"); w.value(report.ap[t].ap50);
        w.end_object();
    }
    w.end_object();
    w.key("keypoint_stats");
    w.begin_object();
    w.key("matched_instances"); w.value(report.keypoint_stats.matched_instances);
    w.key("diameter_error_mean_px"); w.value(report.keypoint_stats.diameter_error_mean);
    w.key("per_keypoint");
    w.begin_array();
    for (int k = 0; k < kKeypointCount; ++k) {
        const PerKeypointStats& pk = report.keypoint_stats.per_keypoint[k];
        w.begin_object();
        w.key("name"); w.value(kKeypointNames[k]);
        w.key("count"); w.value(pk.count);
        w.key("mean_dx"); w.value(pk.mean_dx);
        w.key("mean_dy"); w.value(pk.mean_dy);
        w.key("sigma_x"); w.value(pk.sigma_x);
        w.key("sigma_y"); w.value(pk.sigma_y);
        w.key("mean_euclidean"); w.value(pk.mean_euclidean);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    w.end_object();
    return w.str();
}

std::string report_to_text(const EvalReport& report) {
    std::ostringstream os;
    char line[160];

    os << "Detection and segmentation\n";
    std::snprintf(line, sizeof(line), "%-12s %-10s %-10s %-10s %-10s\n", "Task", "AP", "AP-mask",
                  "AP50", "AP50-mask");
    os << line;
    auto fmt = [](const ApResult& r, double ApResult::*field) {
        char buf[16];
        if (!r.defined) return std::string("-");
        std::snprintf(buf, sizeof(buf), "%.2f", r.*field);
        return std::string(buf);
    };
    std::snprintf(line, sizeof(line), "%-12s %-10s %-10s %-10s %-10s\n", "detection",
                  fmt(report.ap[0], &ApResult::ap).c_str(), fmt(report.ap[1], &ApResult::ap).c_str(),
                  fmt(report.ap[0], &ApResult::ap50).c_str(),
                  fmt(report.ap[1], &ApResult::ap50).c_str());
    os << line;

    os << "\nTask AP\n";
    std::snprintf(line, sizeof(line), "%-12s %-10s %-10s %-10s\n", "Tasks", "AP-bb", "AP-mask",
                  "AP-kp");
    os << line;
    std::snprintf(line, sizeof(line), "%-12s %-10s %-10s %-10s\n", "all",
                  fmt(report.ap[0], &ApResult::ap).c_str(), fmt(report.ap[1], &ApResult::ap).c_str(),
                  fmt(report.ap[2], &ApResult::ap).c_str());
    os << line;

    if (!report.keypoint_stats.empty) {
        os << "\nKeypoint pixel errors (matched at bbox IoU 0.5)\n";
        std::snprintf(line, sizeof(line), "%-16s %8s %9s %9s %9s %9s %10s\n", "keypoint", "count",
                      "mean_dx", "mean_dy", "sigma_x", "sigma_y", "mean_dist");
        os << line;
        for (int k = 0; k < kKeypointCount; ++k) {
            const PerKeypointStats& pk = report.keypoint_stats.per_keypoint[k];
            std::snprintf(line, sizeof(line), "%-16s %8llu %9.3f %9.3f %9.3f %9.3f %10.3f\n",
                          kKeypointNames[k], static_cast<unsigned long long>(pk.count), pk.mean_dx,
                          pk.mean_dy, pk.sigma_x, pk.sigma_y, pk.mean_euclidean);
            os << line;
        }
        std::snprintf(line, sizeof(line), "mean diameter error: %.3f px over %llu instances\n",
                      report.keypoint_stats.diameter_error_mean,
                      static_cast<unsigned long long>(report.keypoint_stats.diameter_samples));
        os << line;
    }
    return os.str();
}

std::string density_to_csv(const KeypointStats& stats) {
    std::ostringstream os;
    os << "keypoint,dx_bin,dy_bin,count\n";
    for (int k = 0; k < kKeypointCount; ++k) {
        const PerKeypointStats& pk = stats.per_keypoint[k];
        if (pk.density.empty()) continue;
        for (int by = 0; by < kHistBins; ++by) {
            for (int bx = 0; bx < kHistBins; ++bx) {
                std::uint32_t c = pk.density[static_cast<std::size_t>(by) * kHistBins + bx];
                if (c == 0) continue;
                os << kKeypointNames[k] << ',' << (bx - kHistRange) << ',' << (by - kHistRange) << ','
                   << c << "\n";
            }
        }
    }
    return os.str();
}

}  // namespace sylvan
