#include "sylvan/dataset_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "sylvan/json_writer.hpp"

namespace sylvan {

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

void validate_document(const CocoDocument& doc) {
    std::unordered_set<std::uint64_t> image_ids, ann_ids;
    for (const CocoImage& img : doc.images)
        if (!image_ids.insert(img.id).second)
            throw std::runtime_error("export_coco: duplicate image id " + std::to_string(img.id));
    for (const Annotation& ann : doc.annotations) {
        if (!ann_ids.insert(ann.annotation_id).second)
            throw std::runtime_error("export_coco: duplicate annotation id " +
                                     std::to_string(ann.annotation_id));
        if (!image_ids.count(ann.image_id))
            throw std::runtime_error("export_coco: annotation " + std::to_string(ann.annotation_id) +
                                     " references missing image " + std::to_string(ann.image_id));
    }
}

}  // namespace

std::string coco_to_json(const CocoDocument& doc) {
    validate_document(doc);
    JsonWriter w;
    w.begin_object();

    w.key("images");
    w.begin_array();
    for (const CocoImage& img : doc.images) {
        w.begin_object();
        w.key("id"); w.value(img.id);
        w.key("file_name"); w.value(img.file_name);
        w.key("width"); w.value(img.width);
        w.key("height"); w.value(img.height);
        w.end_object();
    }
    w.end_array();

    w.key("annotations");
    w.begin_array();
    for (const Annotation& ann : doc.annotations) {
        w.begin_object();
        w.key("id"); w.value(ann.annotation_id);
        w.key("image_id"); w.value(ann.image_id);
        w.key("category_id"); w.value(1);
        w.key("bbox");
        w.begin_array();
        for (double b : ann.bbox) w.value(b);
        w.end_array();
        w.key("area"); w.value(ann.area);
        w.key("iscrowd"); w.value(0);
        w.key("segmentation");
        w.begin_object();
        w.key("size");
        w.begin_array();
        w.value(ann.rle.height);
        w.value(ann.rle.width);
        w.end_array();
        w.key("counts");
        w.begin_array();
        for (std::uint32_t c : ann.rle.counts) w.value(static_cast<std::uint64_t>(c));
        w.end_array();
        w.end_object();
        w.key("keypoints");
        w.begin_array();
        for (const Keypoint& kp : ann.keypoints) {
            w.value(kp.x);
            w.value(kp.y);
            w.value(kp.v);
        }
        w.end_array();
        w.key("num_keypoints"); w.value(ann.num_keypoints);
        w.key("instance_id"); w.value(static_cast<std::uint64_t>(ann.instance_id));
        w.key("distance_m"); w.value(ann.distance_m);
        w.end_object();
    }
    w.end_array();

    w.key("categories");
    w.begin_array();
    w.begin_object();
    w.key("id"); w.value(1);
    w.key("name"); w.value("tree");
    w.key("keypoints");
    w.begin_array();
    for (const char* name : kKeypointNames) w.value(name);
    w.end_array();
    w.key("skeleton");
    w.begin_array();
    const int edges[3][2] = {{1, 4}, {4, 5}, {2, 3}};
    for (const auto& e : edges) {
        w.begin_array();
        w.value(e[0]);
        w.value(e[1]);
        w.end_array();
    }
    w.end_array();
    w.end_object();
    w.end_array();

    w.end_object();
    return w.str();
}

void export_coco(const CocoDocument& doc, const std::string& out_dir, const std::string& split_name) {
    std::filesystem::create_directories(out_dir);
    write_file((std::filesystem::path(out_dir) / ("annotations_" + split_name + ".json")).string(),
               coco_to_json(doc));
}

CocoDocument load_coco(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("invalid JSON in " + path + ": " + e.what());
    }

    CocoDocument out;
    try {
        for (const auto& j : doc.at("images")) {
            CocoImage img;
            img.id = j.at("id").get<std::uint64_t>();
            img.file_name = j.at("file_name").get<std::string>();
            img.width = j.at("width").get<int>();
            img.height = j.at("height").get<int>();
            out.images.push_back(std::move(img));
        }
        for (const auto& j : doc.at("annotations")) {
            Annotation ann;
            ann.annotation_id = j.at("id").get<std::uint64_t>();
            ann.image_id = j.at("image_id").get<std::uint64_t>();
            for (int k = 0; k < 4; ++k) ann.bbox[k] = j.at("bbox").at(k).get<double>();
            ann.area = j.at("area").get<std::uint64_t>();
            const auto& seg = j.at("segmentation");
            ann.rle.height = seg.at("size").at(0).get<int>();
            ann.rle.width = seg.at("size").at(1).get<int>();
            for (const auto& c : seg.at("counts")) ann.rle.counts.push_back(c.get<std::uint32_t>());
            const auto& kps = j.at("keypoints");
            for (int k = 0; k < kKeypointCount; ++k) {
                ann.keypoints[k].x = kps.at(3 * k).get<double>();
                ann.keypoints[k].y = kps.at(3 * k + 1).get<double>();
                ann.keypoints[k].v = kps.at(3 * k + 2).get<int>();
            }
            ann.num_keypoints = j.at("num_keypoints").get<int>();
            if (j.contains("instance_id")) ann.instance_id = j.at("instance_id").get<std::uint32_t>();
            if (j.contains("distance_m")) ann.distance_m = j.at("distance_m").get<double>();
            out.annotations.push_back(std::move(ann));
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed COCO document " + path + ": " + e.what());
    }
    return out;
}

std::string manifest_to_json(const DatasetManifest& manifest) {
    JsonWriter w;
    w.begin_object();
    w.key("master_seed"); w.value(manifest.master_seed);
    w.key("generator_version"); w.value(manifest.generator_version);
    w.key("resolution");
    w.begin_array();
    w.value(manifest.width);
    w.value(manifest.height);
    w.end_array();
    w.key("split_counts");
    w.begin_object();
    w.key("train"); w.value(manifest.train_frames);
    w.key("val"); w.value(manifest.val_frames);
    w.key("test"); w.value(manifest.test_frames);
    w.end_object();
    w.key("scenes");
    w.begin_array();
    for (const SceneEntry& s : manifest.scenes) {
        w.begin_object();
        w.key("scene_seed"); w.value(s.scene_seed);
        w.key("frame_count"); w.value(s.frame_count);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    return w.str();
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    nlohmann::json doc;
    in >> doc;
    DatasetManifest m;
    m.master_seed = doc.at("master_seed").get<std::uint64_t>();
    m.generator_version = doc.at("generator_version").get<std::string>();
    m.width = doc.at("resolution").at(0).get<int>();
    m.height = doc.at("resolution").at(1).get<int>();
    m.train_frames = doc.at("split_counts").at("train").get<std::uint64_t>();
    m.val_frames = doc.at("split_counts").at("val").get<std::uint64_t>();
    m.test_frames = doc.at("split_counts").at("test").get<std::uint64_t>();
    for (const auto& s : doc.at("scenes"))
        m.scenes.push_back({s.at("scene_seed").get<std::uint64_t>(), s.at("frame_count").get<int>()});
    return m;
}

std::vector<int> split_dataset(const std::vector<SceneEntry>& scenes) {
    if (scenes.size() < 3)
        throw std::runtime_error("split_dataset: need at least 3 scenes to fill train/val/test");
    std::uint64_t total = 0;
    for (const SceneEntry& s : scenes) total += static_cast<std::uint64_t>(s.frame_count);

    const double ratios[kSplitCount] = {40.0 / 43.0, 1.0 / 43.0, 2.0 / 43.0};
    double deficit[kSplitCount];
    for (int i = 0; i < kSplitCount; ++i) deficit[i] = total * ratios[i];

    std::vector<int> assignment(scenes.size());
    for (std::size_t s = 0; s < scenes.size(); ++s) {
        int best = 0;
        for (int i = 1; i < kSplitCount; ++i)
            if (deficit[i] > deficit[best]) best = i;
        assignment[s] = best;
        deficit[best] -= scenes[s].frame_count;
    }

    bool filled[kSplitCount] = {false, false, false};
    for (int a : assignment) filled[a] = true;
    for (int i = 0; i < kSplitCount; ++i)
        if (!filled[i])
            throw std::runtime_error(std::string("split_dataset: split '") + kSplitNames[i] +
                                     "' would be empty; add more scenes");
    return assignment;
}

std::vector<DetectionResult> load_predictions(const std::string& path, const CocoDocument* gt) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("invalid JSON in " + path + ": " + e.what());
    }
    if (!doc.is_array()) throw std::runtime_error(path + ": results file must be a JSON array");

    std::unordered_set<std::uint64_t> known_images;
    if (gt)
        for (const CocoImage& img : gt->images) known_images.insert(img.id);

    std::vector<DetectionResult> out;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& j = doc[i];
        auto fail = [&](const std::string& msg) {
            throw std::runtime_error(path + ": entry " + std::to_string(i) + ": " + msg);
        };
        DetectionResult det;
        try {
            det.image_id = j.at("image_id").get<std::uint64_t>();
            det.score = j.at("score").get<double>();
        } catch (const nlohmann::json::exception& e) {
            fail(e.what());
        }
        if (!std::isfinite(det.score) || det.score < 0.0 || det.score > 1.0)
            fail("score out of range [0, 1]");
        if (gt && !known_images.count(det.image_id))
            fail("unknown image_id " + std::to_string(det.image_id));

        if (j.contains("bbox")) {
            std::array<double, 4> b{};
            for (int k = 0; k < 4; ++k) b[k] = j["bbox"].at(k).get<double>();
            det.bbox = b;
        }
        if (j.contains("segmentation")) {
            RleMask rle;
            const auto& seg = j["segmentation"];
            rle.height = seg.at("size").at(0).get<int>();
            rle.width = seg.at("size").at(1).get<int>();
            for (const auto& c : seg.at("counts")) rle.counts.push_back(c.get<std::uint32_t>());
            det.rle = std::move(rle);
        }
        if (j.contains("keypoints")) {
            std::array<Keypoint, kKeypointCount> kps;
            const auto& arr = j["keypoints"];
            if (arr.size() != 3 * kKeypointCount) fail("keypoints array must have 15 entries");
            for (int k = 0; k < kKeypointCount; ++k) {
                kps[k].x = arr.at(3 * k).get<double>();
                kps[k].y = arr.at(3 * k + 1).get<double>();
                kps[k].v = arr.at(3 * k + 2).get<int>();
            }
            det.keypoints = kps;
        }
        if (!det.bbox && !det.rle && !det.keypoints) fail("no bbox/segmentation/keypoints payload");
        out.push_back(std::move(det));
    }
    return out;
}

}  // namespace sylvan
