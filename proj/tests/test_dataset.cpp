#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "sylvan/dataset_io.hpp"
#include "sylvan/rng.hpp"

using namespace sylvan;

namespace {

Annotation make_annotation(std::uint64_t ann_id, std::uint64_t image_id) {
    Annotation a;
    a.annotation_id = ann_id;
    a.image_id = image_id;
    a.instance_id = static_cast<std::uint32_t>(ann_id * 3 + 1);
    a.bbox = {10.25, 20.5, 30.0, 40.125};
    a.rle.height = 8;
    a.rle.width = 8;
    a.rle.counts = {10, 3, 40, 2, 9};
    a.area = a.rle.area();
    for (int k = 0; k < kKeypointCount; ++k) {
        a.keypoints[k].x = 1.000244140625 * (k + 1) + ann_id;  // exercises float round-trip
        a.keypoints[k].y = 7.75 * (k + 1);
        a.keypoints[k].v = k % 3;
    }
    a.num_keypoints = 3;
    a.distance_m = 6.789012345678901;
    return a;
}

CocoDocument sample_document() {
    CocoDocument doc;
    doc.images.push_back({1, "train/000001_rgb.png", 800, 800});
    doc.images.push_back({2, "train/000002_rgb.png", 800, 800});
    doc.annotations.push_back(make_annotation(1, 1));
    doc.annotations.push_back(make_annotation(2, 1));
    doc.annotations.push_back(make_annotation(3, 2));
    return doc;
}

}  // namespace

TEST_CASE("empty document serializes to a valid loadable COCO file") {
    CocoDocument doc;
    std::string json = coco_to_json(doc);
    const char* path = "coco_empty_test.json";
    {
        std::ofstream out(path);
        out << json;
    }
    CocoDocument loaded = load_coco(path);
    CHECK(loaded.images.empty());
    CHECK(loaded.annotations.empty());
    std::remove(path);
}

TEST_CASE("export/load round-trip preserves every field exactly") {
    CocoDocument doc = sample_document();
    export_coco(doc, ".", "rt");
    CocoDocument loaded = load_coco("annotations_rt.json");

    REQUIRE(loaded.images.size() == doc.images.size());
    for (std::size_t i = 0; i < doc.images.size(); ++i) {
        CHECK(loaded.images[i].id == doc.images[i].id);
        CHECK(loaded.images[i].file_name == doc.images[i].file_name);
        CHECK(loaded.images[i].width == doc.images[i].width);
        CHECK(loaded.images[i].height == doc.images[i].height);
    }
    REQUIRE(loaded.annotations.size() == doc.annotations.size());
    for (std::size_t i = 0; i < doc.annotations.size(); ++i) {
        const Annotation& a = doc.annotations[i];
        const Annotation& b = loaded.annotations[i];
        CHECK(a.annotation_id == b.annotation_id);
        CHECK(a.image_id == b.image_id);
        CHECK(a.instance_id == b.instance_id);
        CHECK(a.bbox == b.bbox);
        CHECK(a.area == b.area);
        CHECK(a.rle.height == b.rle.height);
        CHECK(a.rle.width == b.rle.width);
        CHECK(a.rle.counts == b.rle.counts);
        CHECK(a.num_keypoints == b.num_keypoints);
        CHECK(a.distance_m == b.distance_m);
        for (int k = 0; k < kKeypointCount; ++k) {
            CHECK(a.keypoints[k].x == b.keypoints[k].x);
            CHECK(a.keypoints[k].y == b.keypoints[k].y);
            CHECK(a.keypoints[k].v == b.keypoints[k].v);
        }
    }
    std::remove("annotations_rt.json");
}

TEST_CASE("serialization is byte-identical across runs") {
    CocoDocument doc = sample_document();
    CHECK(coco_to_json(doc) == coco_to_json(doc));

    DatasetManifest m;
    m.master_seed = 7;
    m.scenes = {{11, 300}, {12, 450}};
    m.train_frames = 700;
    m.val_frames = 20;
    m.test_frames = 30;
    m.generator_version = "test";
    CHECK(manifest_to_json(m) == manifest_to_json(m));
}

TEST_CASE("duplicate ids are consistency errors") {
    CocoDocument doc = sample_document();
    doc.images.push_back({1, "dup.png", 800, 800});
    CHECK_THROWS_AS(coco_to_json(doc), std::runtime_error);

    CocoDocument doc2 = sample_document();
    doc2.annotations[1].annotation_id = 1;
    CHECK_THROWS_AS(coco_to_json(doc2), std::runtime_error);

    CocoDocument doc3 = sample_document();
    doc3.annotations[0].image_id = 42;  // dangling reference
    CHECK_THROWS_AS(coco_to_json(doc3), std::runtime_error);
}

TEST_CASE("manifest round-trips through JSON") {
    DatasetManifest m;
    m.master_seed = 1234567890123456789ULL;
    m.scenes = {{101, 250}, {102, 1000}, {103, 200}};
    m.train_frames = 1000;
    m.val_frames = 200;
    m.test_frames = 250;
    m.width = 640;
    m.height = 480;
    m.generator_version = "sylvangen-1.0.0";
    const char* path = "manifest_test.json";
    {
        std::ofstream out(path);
        out << manifest_to_json(m);
    }
    DatasetManifest loaded = load_manifest(path);
    CHECK(loaded.master_seed == m.master_seed);
    REQUIRE(loaded.scenes.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(loaded.scenes[i].scene_seed == m.scenes[i].scene_seed);
        CHECK(loaded.scenes[i].frame_count == m.scenes[i].frame_count);
    }
    CHECK(loaded.train_frames == m.train_frames);
    CHECK(loaded.val_frames == m.val_frames);
    CHECK(loaded.test_frames == m.test_frames);
    CHECK(loaded.width == m.width);
    CHECK(loaded.height == m.height);
    CHECK(loaded.generator_version == m.generator_version);
    std::remove(path);
}

TEST_CASE("43 scenes of 1000 frames split exactly 40k/1k/2k") {
    std::vector<SceneEntry> scenes;
    for (int s = 0; s < 43; ++s) scenes.push_back({static_cast<std::uint64_t>(s), 1000});
    auto split = split_dataset(scenes);
    REQUIRE(split.size() == 43);
    std::uint64_t counts[kSplitCount] = {};
    for (std::size_t s = 0; s < scenes.size(); ++s) {
        REQUIRE(split[s] >= 0);
        REQUIRE(split[s] < kSplitCount);
        counts[split[s]] += scenes[s].frame_count;
    }
    CHECK(counts[0] == 40000);
    CHECK(counts[1] == 1000);
    CHECK(counts[2] == 2000);
}

TEST_CASE("too few scenes to fill three splits is a configuration error") {
    CHECK_THROWS_AS(split_dataset({{1, 500}}), std::runtime_error);
    CHECK_THROWS_AS(split_dataset({{1, 500}, {2, 500}}), std::runtime_error);
    CHECK_THROWS_AS(split_dataset({}), std::runtime_error);
}

TEST_CASE("86 equal scenes stay within one scene of the exact 40:1:2 ratio") {
    std::vector<SceneEntry> scenes;
    for (int s = 0; s < 86; ++s) scenes.push_back({static_cast<std::uint64_t>(s), 500});
    auto split = split_dataset(scenes);
    double total = 86.0 * 500.0;
    double counts[kSplitCount] = {};
    for (std::size_t s = 0; s < scenes.size(); ++s) counts[split[s]] += scenes[s].frame_count;
    const double ratios[kSplitCount] = {40.0 / 43.0, 1.0 / 43.0, 2.0 / 43.0};
    for (int k = 0; k < kSplitCount; ++k) {
        CHECK(counts[k] > 0.0);
        CHECK(std::abs(counts[k] - ratios[k] * total) <= 500.0);
    }
}

TEST_CASE("split assignment is deterministic and scene-atomic by construction") {
    Rng rng(77);
    std::vector<SceneEntry> scenes;
    for (int s = 0; s < 60; ++s)
        scenes.push_back({rng.next_u64(), 200 + static_cast<int>(rng.below(801))});
    auto a = split_dataset(scenes);
    auto b = split_dataset(scenes);
    CHECK(a == b);
}

TEST_CASE("load_predictions: empty list and payload validation") {
    const char* path = "pred_test.json";
    {
        std::ofstream out(path);
        out << "[]";
    }
    CHECK(load_predictions(path).empty());

    {
        std::ofstream out(path);
        out << R"([{"image_id": 1, "category_id": 1, "score": 0.75,
                    "bbox": [10.0, 20.0, 30.0, 40.0]}])";
    }
    auto dets = load_predictions(path);
    REQUIRE(dets.size() == 1);
    CHECK(dets[0].image_id == 1);
    CHECK(dets[0].score == 0.75);
    REQUIRE(dets[0].bbox.has_value());
    CHECK((*dets[0].bbox)[2] == 30.0);
    CHECK(!dets[0].rle.has_value());
    std::remove(path);
}

TEST_CASE("load_predictions rejects bad scores, unknown images, missing payloads") {
    const char* path = "pred_bad_test.json";
    CocoDocument gt = sample_document();

    {
        std::ofstream out(path);
        out << R"([{"image_id": 9999, "category_id": 1, "score": 0.5, "bbox": [0,0,1,1]}])";
    }
    CHECK_THROWS_AS(load_predictions(path, &gt), std::runtime_error);

    {
        std::ofstream out(path);
        out << R"([{"image_id": 1, "category_id": 1, "score": 1.5, "bbox": [0,0,1,1]}])";
    }
    CHECK_THROWS_AS(load_predictions(path), std::runtime_error);

    {
        std::ofstream out(path);
        out << R"([{"image_id": 1, "category_id": 1, "score": 0.5}])";
    }
    CHECK_THROWS_AS(load_predictions(path), std::runtime_error);

    {
        std::ofstream out(path);
        out << "not json";
    }
    CHECK_THROWS_AS(load_predictions(path), std::runtime_error);
    std::remove(path);
}

TEST_CASE("predictions derived from our own ground truth load losslessly") {
    CocoDocument gt = sample_document();
    const char* path = "pred_self_test.json";
    {
        std::ofstream out(path);
        out << "[";
        for (std::size_t i = 0; i < gt.annotations.size(); ++i) {
            const Annotation& a = gt.annotations[i];
            if (i) out << ",";
            out << "{\"image_id\": " << a.image_id << ", \"category_id\": 1, \"score\": 1.0,"
                << "\"bbox\": [" << a.bbox[0] << "," << a.bbox[1] << "," << a.bbox[2] << ","
                << a.bbox[3] << "]}";
        }
        out << "]";
    }
    auto dets = load_predictions(path, &gt);
    REQUIRE(dets.size() == gt.annotations.size());
    for (std::size_t i = 0; i < dets.size(); ++i) {
        CHECK(dets[i].image_id == gt.annotations[i].image_id);
        CHECK(dets[i].score == 1.0);
        REQUIRE(dets[i].bbox.has_value());
        for (int k = 0; k < 4; ++k)
            CHECK((*dets[i].bbox)[k] == doctest::Approx(gt.annotations[i].bbox[k]).epsilon(1e-12));
    }
    std::remove(path);
}
