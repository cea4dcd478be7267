#pragma once

#include <cstdint>
#include <vector>

namespace sylvan {

enum class TextureClass : std::uint8_t { MOSS = 0, ROOTS = 1, MUD = 2 };

/// Heightfield on a regular node lattice. Node (i, j) sits at world
/// (i * cell_size, j * cell_size); the grid covers
/// (width_cells - 1) * cell_size meters per axis.
struct TerrainGrid {
    int width_cells = 0;
    int height_cells = 0;
    double cell_size = 0.0;
    std::vector<double> heights;              // row-major, heights[j * width_cells + i]
    std::vector<TextureClass> texture_class;  // same layout
    std::uint64_t seed = 0;

    double height_at_node(int i, int j) const { return heights[static_cast<std::size_t>(j) * width_cells + i]; }
    TextureClass texture_at_node(int i, int j) const {
        return texture_class[static_cast<std::size_t>(j) * width_cells + i];
    }
    double extent_x() const { return (width_cells - 1) * cell_size; }
    double extent_y() const { return (height_cells - 1) * cell_size; }
};

struct HeightmapParams {
    double size_m = 128.0;
    double cell_size = 0.5;
    double amplitude = 6.0;
    int octaves = 4;
    double base_frequency = 1.0 / 32.0;  // 1/m
};

struct TextureRules {
    double mud_below = 0.0;            // meters
    double roots_slope_above = 0.35;   // radians
};

/// Fractal value noise in [-1, 1]: `octaves` layers, each doubling frequency
/// and halving amplitude, on an integer-hash lattice.
double fractal_value_noise(std::uint64_t seed, double x, double y, int octaves, double base_frequency);

/// Builds the grid from fixed-seed fractal value noise and assigns textures
/// with the default rules (mud below the 25th height percentile, roots on
/// slopes >= 0.35 rad).
TerrainGrid generate_heightmap(std::uint64_t seed, const HeightmapParams& params);

/// Bilinear height at a continuous in-extent point. Throws std::domain_error
/// outside the extent.
double sample_height(const TerrainGrid& grid, double x, double y);

/// Slope angle from central finite differences of sample_height with step
/// cell_size. Requires (x, y) at least one cell from the boundary.
double slope_at(const TerrainGrid& grid, double x, double y);

/// Per-cell classification: MUD if height < mud_below, else ROOTS if the
/// cell slope >= roots_slope_above, else MOSS. Boundary cells use one-sided
/// differences.
void assign_textures(TerrainGrid& grid, const TextureRules& rules);

/// Default mud threshold: 25th percentile of grid heights.
double height_percentile(const TerrainGrid& grid, double fraction);

}  // namespace sylvan
