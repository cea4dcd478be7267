#include "sylvan/annotate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace sylvan {

std::uint64_t RleMask::area() const {
    std::uint64_t total = 0;
    for (std::size_t i = 1; i < counts.size(); i += 2) total += counts[i];
    return total;
}

RleMask mask_to_rle(const std::vector<std::uint8_t>& mask, int height, int width) {
    if (mask.size() != static_cast<std::size_t>(height) * width)
        throw std::invalid_argument("mask_to_rle: mask size does not match dimensions");
    RleMask rle;
    rle.height = height;
    rle.width = width;
    std::uint8_t current = 0;  // runs start with zeros
    std::uint32_t run = 0;
    for (int x = 0; x < width; ++x) {
        for (int y = 0; y < height; ++y) {
            std::uint8_t bit = mask[static_cast<std::size_t>(y) * width + x] ? 1 : 0;
            if (bit == current) {
                ++run;
            } else {
                rle.counts.push_back(run);
                current = bit;
                run = 1;
            }
        }
    }
    rle.counts.push_back(run);
    return rle;
}

std::vector<std::uint8_t> rle_decode(const RleMask& rle) {
    std::uint64_t total = 0;
    for (std::uint32_t c : rle.counts) total += c;
    auto expected = static_cast<std::uint64_t>(rle.height) * rle.width;
    if (total != expected) throw std::runtime_error("rle_decode: counts do not sum to height * width");

    std::vector<std::uint8_t> mask(expected, 0);
    std::uint64_t pos = 0;
    std::uint8_t bit = 0;
    for (std::uint32_t c : rle.counts) {
        if (bit) {
            for (std::uint32_t k = 0; k < c; ++k) {
                std::uint64_t p = pos + k;
                auto x = static_cast<int>(p / rle.height);
                auto y = static_cast<int>(p % rle.height);
                mask[static_cast<std::size_t>(y) * rle.width + x] = 1;
            }
        }
        pos += c;
        bit ^= 1;
    }
    return mask;
}

std::array<Keypoint, kKeypointCount> project_keypoints(const TreeInstance& tree,
                                                       const CameraPose& camera,
                                                       const std::vector<float>& depth_m,
                                                       int width, int height,
                                                       double occlusion_tolerance) {
    Vec3 view{tree.base_position.x - camera.position.x, tree.base_position.y - camera.position.y, 0.0};
    auto points = tree_keypoints_3d(tree, view);

    std::array<Keypoint, kKeypointCount> out;
    for (int k = 0; k < kKeypointCount; ++k) {
        ProjectedPoint proj = project_point(camera, points[k]);
        Keypoint kp;
        kp.x = proj.u;
        kp.y = proj.v;
        bool inside = proj.in_front && proj.u >= 0.0 && proj.v >= 0.0 && proj.u <= width - 1 &&
                      proj.v <= height - 1;
        if (!inside) {
            kp.v = 0;
        } else {
            int px = static_cast<int>(std::lround(proj.u));
            int py = static_cast<int>(std::lround(proj.v));
            double buffer_depth = depth_m[static_cast<std::size_t>(py) * width + px];
            kp.v = proj.distance <= buffer_depth + occlusion_tolerance ? 2 : 1;
        }
        out[k] = kp;
    }
    return out;
}

std::vector<Annotation> extract_instances(const FrameBundle& frame,
                                          const std::vector<TreeInstance>& trees,
                                          const AnnotateConfig& config) {
    std::unordered_map<std::uint32_t, const TreeInstance*> by_id;
    for (const TreeInstance& t : trees) by_id[t.id] = &t;

    struct Census {
        std::uint64_t pixels = 0;
        int min_x = std::numeric_limits<int>::max(), min_y = std::numeric_limits<int>::max();
        int max_x = -1, max_y = -1;
    };
    std::unordered_map<std::uint32_t, Census> census;

    int w = frame.width, h = frame.height;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::uint32_t id = frame.instance_id[frame.pixel(x, y)];
            if (id == 0) continue;
            if (!by_id.count(id))
                throw std::runtime_error("extract_instances: frame references unknown instance id " +
                                         std::to_string(id));
            if (config.trunk_only &&
                frame.part[frame.pixel(x, y)] != static_cast<std::uint8_t>(MeshPart::TRUNK))
                continue;
            Census& c = census[id];
            ++c.pixels;
            c.min_x = std::min(c.min_x, x);
            c.min_y = std::min(c.min_y, y);
            c.max_x = std::max(c.max_x, x);
            c.max_y = std::max(c.max_y, y);
        }
    }

    std::vector<Annotation> out;
    std::uint64_t next_id = 1;
    for (const TreeInstance& tree : trees) {
        double dist = length(tree.base_position - frame.camera.position);
        if (dist > config.radius_m) continue;
        auto it = census.find(tree.id);
        if (it == census.end() || it->second.pixels < config.min_pixels) continue;
        const Census& c = it->second;

        Annotation ann;
        ann.annotation_id = next_id++;
        ann.instance_id = tree.id;
        ann.distance_m = dist;
        ann.bbox = {static_cast<double>(c.min_x), static_cast<double>(c.min_y),
                    static_cast<double>(c.max_x - c.min_x + 1), static_cast<double>(c.max_y - c.min_y + 1)};
        ann.area = c.pixels;

        std::vector<std::uint8_t> mask(static_cast<std::size_t>(w) * h, 0);
        for (int y = c.min_y; y <= c.max_y; ++y) {
            for (int x = c.min_x; x <= c.max_x; ++x) {
                if (frame.instance_id[frame.pixel(x, y)] != tree.id) continue;
                if (config.trunk_only &&
                    frame.part[frame.pixel(x, y)] != static_cast<std::uint8_t>(MeshPart::TRUNK))
                    continue;
                mask[static_cast<std::size_t>(y) * w + x] = 1;
            }
        }
        ann.rle = mask_to_rle(mask, h, w);

        ann.keypoints = project_keypoints(tree, frame.camera, frame.depth_m, w, h,
                                          config.occlusion_tolerance);
        ann.num_keypoints = 0;
        for (const Keypoint& kp : ann.keypoints)
            if (kp.v > 0) ++ann.num_keypoints;

        out.push_back(std::move(ann));
    }
    return out;
}

}  // namespace sylvan
