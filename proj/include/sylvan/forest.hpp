#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sylvan/geom.hpp"
#include "sylvan/mesh.hpp"
#include "sylvan/terrain.hpp"

namespace sylvan {

inline constexpr double kFellingCutHeight = 0.10;  // meters above base, along the trunk axis

struct TreeInstance {
    std::uint32_t id = 0;          // unique within a scene, > 0
    Vec3 base_position;            // z = terrain height at (x, y)
    int species = 0;               // index into the species table
    double trunk_height = 0.0;     // meters
    double dbh = 0.0;              // trunk diameter at felling-cut height, meters
    Vec2 lean_axis{1.0, 0.0};      // unit horizontal direction of the lean
    double lean_angle = 0.0;       // radians, <= 0.25
    double crown_radius = 0.0;     // meters
    double crown_height = 0.0;     // meters
    double color_variation = 0.0;  // [0, 1]
};

enum class PropKind : std::uint8_t { GRASS = 0, STUMP = 1, SCRUB = 2, BRANCH = 3 };
inline constexpr int kPropKindCount = 4;

struct PropInstance {
    PropKind kind = PropKind::GRASS;
    Vec3 position;
    double scale = 1.0;
    double yaw = 0.0;
};

struct SpawnRules {
    double altitude_min = -1e9;      // meters
    double altitude_max = 1e9;
    double max_slope = 0.6;          // radians
    double neighbor_radius = 4.0;    // meters
    int max_neighbors = 6;
    double target_density = 400.0;   // trees per hectare
    double min_spacing = 1.2;        // meters
};

struct SpeciesTemplate {
    std::string name;
    double trunk_height_min = 8.0, trunk_height_max = 22.0;
    double dbh_min = 0.2, dbh_max = 0.6;
    double max_lean = 0.12;          // radians, capped at 0.25
    int crown_lobes = 4;             // 3..6
    double crown_radius_min = 1.2, crown_radius_max = 3.0;
    double crown_height_min = 3.0, crown_height_max = 7.0;
    Vec3f bark_color{0.45f, 0.33f, 0.22f};
    Vec3f crown_color{0.13f, 0.35f, 0.12f};
};

/// Built-in table of 17 parameter templates.
const std::vector<SpeciesTemplate>& default_species_table();

/// Loads a species table from a JSON config file (schema_version 1).
/// Throws std::runtime_error on schema or I/O errors.
std::vector<SpeciesTemplate> load_species_table(const std::string& path);

/// Dart-throwing placement under the spawn rules. Deterministic in
/// (grid, rules, seed); attempt budget is 64x the target count.
std::vector<TreeInstance> place_trees(const TerrainGrid& grid, const SpawnRules& rules,
                                      const std::vector<SpeciesTemplate>& species_table,
                                      std::uint64_t rng_seed);

/// Uniform understorey scattering, floor(density * area_ha) per kind,
/// no spacing constraints. Kinds are processed in enum order.
std::vector<PropInstance> place_understorey(const TerrainGrid& grid,
                                            const std::array<double, kPropKindCount>& density_per_ha,
                                            std::uint64_t rng_seed);

/// Tapered-cylinder trunk (12 radial x 8 height segments, caps) plus 3-6
/// ellipsoid crown lobes. Pure function of the instance.
Mesh build_tree_geometry(const TreeInstance& tree, const std::vector<SpeciesTemplate>& species_table);

Mesh build_prop_geometry(const PropInstance& prop);

enum KeypointIndex {
    KP_FELLING_CUT = 0,
    KP_DIAMETER_LEFT = 1,
    KP_DIAMETER_RIGHT = 2,
    KP_MIDDLE = 3,
    KP_TOP = 4,
};
inline constexpr int kKeypointCount = 5;

/// World-space keypoints in canonical order. view_dir is the horizontal
/// camera-to-tree direction; the diameter pair lies on the trunk surface at
/// cut height, perpendicular to it (left = negative screen-x side).
/// Throws std::domain_error when view_dir has no horizontal component.
std::array<Vec3, kKeypointCount> tree_keypoints_3d(const TreeInstance& tree, const Vec3& view_dir);

}  // namespace sylvan
