#include "sylvan/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>
#include <vector>

#include <json.hpp>

#include "sylvan/image_io.hpp"
#include "sylvan/rng.hpp"

namespace sylvan {

namespace fs = std::filesystem;

GenerateConfig load_generate_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("invalid config JSON: " + std::string(e.what()));
    }

    GenerateConfig cfg;
    auto get = [&](const char* key, auto& field) {
        if (doc.contains(key)) field = doc[key].get<std::decay_t<decltype(field)>>();
    };
    get("master_seed", cfg.master_seed);
    get("n_scenes", cfg.n_scenes);
    if (doc.contains("frames_per_scene_range")) {
        cfg.frames_min = doc["frames_per_scene_range"].at(0).get<int>();
        cfg.frames_max = doc["frames_per_scene_range"].at(1).get<int>();
    }
    if (doc.contains("resolution")) {
        cfg.width = doc["resolution"].at(0).get<int>();
        cfg.height = doc["resolution"].at(1).get<int>();
    }
    get("d_max", cfg.d_max);
    get("annotation_radius", cfg.annotation_radius);
    get("min_pixels", cfg.min_pixels);
    get("trunk_only", cfg.trunk_only);
    get("out_dir", cfg.out_dir);
    get("workers", cfg.workers);
    get("write_instance_ids", cfg.write_instance_ids);
    if (doc.contains("tod_weights"))
        for (int i = 0; i < 4; ++i) cfg.tod_weights[i] = doc["tod_weights"].at(i).get<double>();
    if (doc.contains("weather_weights"))
        for (int i = 0; i < 4; ++i) cfg.weather_weights[i] = doc["weather_weights"].at(i).get<double>();
    if (doc.contains("terrain")) {
        const auto& t = doc["terrain"];
        if (t.contains("size_m")) cfg.terrain.size_m = t["size_m"].get<double>();
        if (t.contains("cell_size")) cfg.terrain.cell_size = t["cell_size"].get<double>();
        if (t.contains("amplitude")) cfg.terrain.amplitude = t["amplitude"].get<double>();
        if (t.contains("octaves")) cfg.terrain.octaves = t["octaves"].get<int>();
        if (t.contains("base_frequency")) cfg.terrain.base_frequency = t["base_frequency"].get<double>();
    }
    if (doc.contains("spawn")) {
        const auto& s = doc["spawn"];
        if (s.contains("target_density")) cfg.spawn.target_density = s["target_density"].get<double>();
        if (s.contains("min_spacing")) cfg.spawn.min_spacing = s["min_spacing"].get<double>();
        if (s.contains("max_slope")) cfg.spawn.max_slope = s["max_slope"].get<double>();
        if (s.contains("neighbor_radius")) cfg.spawn.neighbor_radius = s["neighbor_radius"].get<double>();
        if (s.contains("max_neighbors")) cfg.spawn.max_neighbors = s["max_neighbors"].get<int>();
    }
    if (doc.contains("understorey_density"))
        for (int i = 0; i < kPropKindCount; ++i)
            cfg.understorey_density[i] = doc["understorey_density"].at(i).get<double>();

    double wsum = 0.0;
    for (double v : cfg.tod_weights) wsum += v;
    for (double v : cfg.tod_weights)
        if (v < 0.0) throw std::runtime_error("config: tod_weights must be non-negative");
    if (wsum <= 0.0) throw std::runtime_error("config: tod_weights must not be all zero");
    wsum = 0.0;
    for (double v : cfg.weather_weights) wsum += v;
    for (double v : cfg.weather_weights)
        if (v < 0.0) throw std::runtime_error("config: weather_weights must be non-negative");
    if (wsum <= 0.0) throw std::runtime_error("config: weather_weights must not be all zero");
    if (cfg.frames_min <= 0 || cfg.frames_max < cfg.frames_min)
        throw std::runtime_error("config: invalid frames_per_scene_range");
    return cfg;
}

namespace {

int weighted_pick(Rng& rng, const std::array<double, 4>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = rng.uniform() * total;
    double acc = 0.0;
    for (int i = 0; i < 4; ++i) {
        acc += weights[i];
        if (u < acc) return i;
    }
    return 3;
}

}  // namespace

Conditions sample_conditions(std::uint64_t seed, const GenerateConfig& config) {
    Rng rng(seed);
    Conditions c;
    c.time_of_day = static_cast<TimeOfDay>(weighted_pick(rng, config.tod_weights));
    c.weather = static_cast<Weather>(weighted_pick(rng, config.weather_weights));
    c.overlay_seed = seed;
    switch (c.weather) {
        case Weather::FOG:
            c.fog_density = rng.uniform(0.02, 0.08);
            break;
        case Weather::RAIN:
            c.precipitation_intensity = rng.uniform(0.3, 1.0);
            c.wet = true;
            c.fog_density = 0.01;
            break;
        case Weather::SNOW:
            c.precipitation_intensity = rng.uniform(0.3, 1.0);
            c.snow_cover = rng.uniform(0.3, 1.0);
            c.fog_density = 0.01;
            break;
        case Weather::CLEAR:
            break;
    }
    return c;
}

int resolve_workers(int requested) {
    int workers = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 1;
    if (const char* env = std::getenv("SYLVANGEN_THREADS")) {
        int cap = std::atoi(env);
        if (cap > 0) workers = std::min(workers, cap);
    }
    return workers;
}

namespace {

struct FrameResult {
    std::uint64_t image_id = 0;
    std::string file_name;
    std::vector<Annotation> annotations;
};

std::string frame_file(std::uint64_t frame_id, const char* suffix) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%06llu_%s.png", static_cast<unsigned long long>(frame_id), suffix);
    return buf;
}

}  // namespace

GenerateSummary run_generate(const GenerateConfig& config) {
    auto t_start = std::chrono::steady_clock::now();

    // Scene plan.
    std::vector<SceneEntry> plan(config.n_scenes);
    for (int s = 0; s < config.n_scenes; ++s) {
        plan[s].scene_seed = derive_seed(config.master_seed, static_cast<std::uint64_t>(s));
        Rng rng(derive_seed(plan[s].scene_seed, 0xf00dULL));
        plan[s].frame_count =
            config.frames_min + static_cast<int>(rng.below(config.frames_max - config.frames_min + 1));
    }

    // Scene-atomic split assignment; with fewer than 3 scenes everything
    // lands in train (split_dataset itself requires >= 3 scenes).
    std::vector<int> split_of_scene(config.n_scenes, 0);
    if (config.n_scenes >= 3) split_of_scene = split_dataset(plan);

    for (int split = 0; split < kSplitCount; ++split)
        fs::create_directories(fs::path(config.out_dir) / kSplitNames[split]);

    CameraConfig cam_cfg = config.camera;
    cam_cfg.width = config.width;
    cam_cfg.height = config.height;

    AnnotateConfig ann_cfg;
    ann_cfg.radius_m = config.annotation_radius;
    ann_cfg.min_pixels = config.min_pixels;
    ann_cfg.trunk_only = config.trunk_only;

    const auto& species = default_species_table();
    int workers = resolve_workers(config.workers);

    std::array<CocoDocument, kSplitCount> docs;
    GenerateSummary summary;
    std::uint64_t next_image_id = 0;

    for (int s = 0; s < config.n_scenes; ++s) {
        std::uint64_t scene_seed = plan[s].scene_seed;
        TerrainGrid grid = generate_heightmap(derive_seed(scene_seed, 1), config.terrain);
        auto trees = place_trees(grid, config.spawn, species, derive_seed(scene_seed, 2));
        auto props = place_understorey(grid, config.understorey_density, derive_seed(scene_seed, 3));
        Scene scene = build_scene(grid, std::move(trees), props, species);

        int split = split_of_scene[s];
        fs::path split_dir = fs::path(config.out_dir) / kSplitNames[split];
        std::uint64_t base_image_id = next_image_id;
        int frame_count = plan[s].frame_count;
        next_image_id += static_cast<std::uint64_t>(frame_count);

        std::vector<FrameResult> results(frame_count);
        std::atomic<int> cursor{0};
        std::vector<std::thread> pool;
        int n_threads = std::min(workers, frame_count);
        auto worker = [&]() {
            for (;;) {
                int j = cursor.fetch_add(1);
                if (j >= frame_count) return;
                std::uint64_t frame_seed = derive_seed(scene_seed, 0x1000ULL + j);
                std::uint64_t image_id = base_image_id + static_cast<std::uint64_t>(j);

                CameraPose camera = place_camera(grid, derive_seed(frame_seed, 1), cam_cfg);
                Conditions conditions = sample_conditions(derive_seed(frame_seed, 2), config);
                conditions.overlay_seed = frame_seed;

                FrameBundle frame = render_frame(scene, camera, conditions);

                FrameResult res;
                res.image_id = image_id;
                res.file_name = std::string(kSplitNames[split]) + "/" + frame_file(image_id, "rgb");
                res.annotations = extract_instances(frame, scene.trees, ann_cfg);
                for (Annotation& ann : res.annotations) ann.image_id = image_id;

                write_png_rgb8((split_dir / frame_file(image_id, "rgb")).string(), frame.rgb,
                               frame.width, frame.height);
                write_png_gray8((split_dir / frame_file(image_id, "depth")).string(),
                                encode_depth(frame.depth_m, config.d_max), frame.width, frame.height);
                if (config.write_instance_ids) {
                    std::vector<std::uint16_t> ids(frame.instance_id.size());
                    for (std::size_t k = 0; k < ids.size(); ++k)
                        ids[k] = static_cast<std::uint16_t>(frame.instance_id[k]);
                    write_png_gray16((split_dir / frame_file(image_id, "ids")).string(), ids,
                                     frame.width, frame.height);
                }
                results[j] = std::move(res);
            }
        };
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();

        for (FrameResult& res : results) {
            docs[split].images.push_back(
                {res.image_id, res.file_name, config.width, config.height});
            for (Annotation& ann : res.annotations) docs[split].annotations.push_back(std::move(ann));
            ++summary.split_frames[split];
            ++summary.frames;
        }
    }

    // Globally unique annotation ids, assigned in deterministic frame order.
    std::uint64_t next_ann_id = 1;
    for (int split = 0; split < kSplitCount; ++split)
        for (Annotation& ann : docs[split].annotations) ann.annotation_id = next_ann_id++;

    for (int split = 0; split < kSplitCount; ++split) {
        export_coco(docs[split], config.out_dir, kSplitNames[split]);
        summary.annotations += docs[split].annotations.size();
    }

    DatasetManifest manifest;
    manifest.master_seed = config.master_seed;
    manifest.scenes = plan;
    manifest.train_frames = summary.split_frames[0];
    manifest.val_frames = summary.split_frames[1];
    manifest.test_frames = summary.split_frames[2];
    manifest.width = config.width;
    manifest.height = config.height;
    manifest.generator_version = kGeneratorVersion;
    {
        std::ofstream out(fs::path(config.out_dir) / "manifest.json", std::ios::binary);
        if (!out) throw std::runtime_error("cannot write manifest");
        out << manifest_to_json(manifest);
    }

    summary.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return summary;
}

}  // namespace sylvan
