#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "sylvan/annotate.hpp"
#include "sylvan/dataset_io.hpp"
#include "sylvan/forest.hpp"
#include "sylvan/render.hpp"
#include "sylvan/terrain.hpp"

namespace sylvan {

inline constexpr const char* kGeneratorVersion = "sylvangen-1.0.0";

struct GenerateConfig {
    std::uint64_t master_seed = 7;
    int n_scenes = 1;
    int frames_min = 200;
    int frames_max = 1000;
    int width = 800;
    int height = 800;
    double d_max = 30.0;              // depth encoding range, meters
    double annotation_radius = 10.0;  // meters
    std::uint64_t min_pixels = 50;
    bool trunk_only = false;
    std::array<double, 4> tod_weights{1.0, 1.0, 1.0, 1.0};      // morning/daylight/evening/dusk
    std::array<double, 4> weather_weights{3.0, 1.0, 1.0, 1.0};  // clear/fog/rain/snow
    HeightmapParams terrain;
    SpawnRules spawn;
    std::array<double, kPropKindCount> understorey_density{800.0, 20.0, 60.0, 40.0};
    CameraConfig camera;
    std::string out_dir = "dataset";
    int workers = 0;  // 0 = hardware concurrency; SYLVANGEN_THREADS caps this
    bool write_instance_ids = false;
};

/// Reads a JSON config file; missing keys keep their defaults.
GenerateConfig load_generate_config(const std::string& path);

/// Deterministic per-frame condition sample from the configured mixture.
Conditions sample_conditions(std::uint64_t seed, const GenerateConfig& config);

int resolve_workers(int requested);

struct GenerateSummary {
    std::uint64_t frames = 0;
    std::uint64_t annotations = 0;
    double seconds = 0.0;
    std::array<std::uint64_t, kSplitCount> split_frames{};
};

/// Full dataset generation: scenes -> frames -> annotations -> COCO splits +
/// manifest on disk. Output is a pure function of the config, independent of
/// the worker count.
GenerateSummary run_generate(const GenerateConfig& config);

}  // namespace sylvan
