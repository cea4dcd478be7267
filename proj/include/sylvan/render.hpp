#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <vector>

#include "sylvan/forest.hpp"
#include "sylvan/geom.hpp"
#include "sylvan/mesh.hpp"
#include "sylvan/terrain.hpp"

namespace sylvan {

struct CameraPose {
    Vec3 position;
    double yaw = 0.0;    // radians, about +z; yaw 0 looks along +x
    double pitch = 0.0;  // radians, positive looks up
    double vertical_fov = 1.0;
    int width = 800;
    int height = 800;

    double focal_px() const { return height / (2.0 * std::tan(vertical_fov / 2.0)); }
};

struct CameraBasis {
    Vec3 right, down, forward;
};

CameraBasis camera_basis(const CameraPose& camera);

struct ProjectedPoint {
    double u = 0.0, v = 0.0;   // pixel coordinates; principal point at ((w-1)/2, (h-1)/2)
    double view_z = 0.0;       // camera-space depth along forward
    double distance = 0.0;     // metric distance along the pixel ray
    bool in_front = false;
};

ProjectedPoint project_point(const CameraPose& camera, const Vec3& world);

/// World-space unit direction of the ray through pixel center (px, py).
Vec3 pixel_ray(const CameraPose& camera, double px, double py);

enum class TimeOfDay : std::uint8_t { MORNING = 0, DAYLIGHT = 1, EVENING = 2, DUSK = 3 };
enum class Weather : std::uint8_t { CLEAR = 0, FOG = 1, RAIN = 2, SNOW = 3 };

struct Conditions {
    TimeOfDay time_of_day = TimeOfDay::DAYLIGHT;
    Weather weather = Weather::CLEAR;
    double fog_density = 0.0;              // 1/m
    double precipitation_intensity = 0.0;  // [0, 1]
    bool wet = false;
    double snow_cover = 0.0;               // [0, 1]
    std::uint64_t overlay_seed = 0;        // seeds the precipitation overlay
    double sun_scale = 1.0;                // 0 disables direct sun (ambient only)
};

struct SunPreset {
    double elevation;   // radians
    double azimuth;     // radians
    Vec3 color;         // sun light color
    double intensity;
    double ambient;
    Vec3 sky_horizon;
    Vec3 sky_zenith;
};

const SunPreset& sun_preset(TimeOfDay tod);

struct FrameBundle {
    int width = 0, height = 0;
    std::vector<std::uint8_t> rgb;          // w*h*3
    std::vector<float> depth_m;             // +inf for sky
    std::vector<std::uint32_t> instance_id; // 0 = none
    std::vector<std::uint8_t> part;         // MeshPart per pixel
    std::vector<std::uint8_t> up_mask;      // 1 where upward-facing terrain/crown
    CameraPose camera;
    Conditions conditions;

    std::size_t pixel(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
};

/// Orthographic depth map from the sun, used for hard shadows.
struct ShadowMap {
    int size = 1024;
    Vec3 dir;        // from sun toward the scene
    Vec3 axis_u, axis_v;
    double min_u = 0.0, min_v = 0.0, scale_u = 1.0, scale_v = 1.0;
    std::vector<float> depth;

    bool lit(const Vec3& world, double bias) const;
};

struct Scene;

struct ShadowCache {
    std::mutex mutex;
    std::array<std::shared_ptr<const ShadowMap>, 4> maps;
};

struct Scene {
    const TerrainGrid* grid = nullptr;
    std::vector<TreeInstance> trees;
    std::vector<Mesh> meshes;  // terrain first, then props, then trees
    std::vector<std::array<Vec3, 2>> mesh_bounds;
    Vec3 scene_min, scene_max;
    std::shared_ptr<ShadowCache> shadow_cache;

    /// Lazily built, cached per time of day; identical regardless of the
    /// caller thread.
    std::shared_ptr<const ShadowMap> shadow_map(TimeOfDay tod) const;
};

Mesh build_terrain_mesh(const TerrainGrid& grid);

Scene build_scene(const TerrainGrid& grid, std::vector<TreeInstance> trees,
                  const std::vector<PropInstance>& props,
                  const std::vector<SpeciesTemplate>& species_table);

struct CameraConfig {
    double height_min = 1.5, height_max = 2.5;   // eye height above terrain, meters
    double pitch_min = -0.15, pitch_max = 0.10;  // radians
    double vertical_fov = 1.0;
    int width = 800, height = 800;
};

/// Random pose in the central half of the terrain.
CameraPose place_camera(const TerrainGrid& grid, std::uint64_t rng_seed, const CameraConfig& config);

/// Full frame: z-buffered rasterization, Lambertian sun shading with a hard
/// shadow map, sky gradient, then the weather post-pass.
FrameBundle render_frame(const Scene& scene, const CameraPose& camera, const Conditions& conditions);

/// gray = round(255 * (1 - clamp(depth / d_max, 0, 1))), half away from zero.
std::vector<std::uint8_t> encode_depth(const std::vector<float>& depth_m, double d_max);

/// Weather post-pass over an already shaded frame: wet albedo scaling, snow
/// blending (up_mask pixels), distance fog, precipitation overlay. Sky
/// pixels (infinite depth) are untouched by fog.
void apply_weather(std::vector<std::uint8_t>& rgb, const std::vector<float>& depth_m, int width,
                   int height, const Conditions& conditions,
                   const std::vector<std::uint8_t>* up_mask = nullptr);

}  // namespace sylvan
