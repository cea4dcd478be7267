#include "sylvan/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sylvan/rng.hpp"

namespace sylvan {

namespace {

double lattice_value(std::uint64_t seed, std::int64_t xi, std::int64_t yi) {
    // Map the 64-bit hash to [-1, 1].
    std::uint64_t h = hash_lattice(seed, xi, yi);
    return static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

double value_noise(std::uint64_t seed, double x, double y) {
    double fx = std::floor(x);
    double fy = std::floor(y);
    auto xi = static_cast<std::int64_t>(fx);
    auto yi = static_cast<std::int64_t>(fy);
    double tx = smoothstep(x - fx);
    double ty = smoothstep(y - fy);

    double v00 = lattice_value(seed, xi, yi);
    double v10 = lattice_value(seed, xi + 1, yi);
    double v01 = lattice_value(seed, xi, yi + 1);
    double v11 = lattice_value(seed, xi + 1, yi + 1);

    double a = v00 + (v10 - v00) * tx;
    double b = v01 + (v11 - v01) * tx;
    return a + (b - a) * ty;
}

}  // namespace

double fractal_value_noise(std::uint64_t seed, double x, double y, int octaves, double base_frequency) {
    double sum = 0.0;
    double amp = 1.0;
    double freq = base_frequency;
    double norm = 0.0;
    for (int o = 0; o < octaves; ++o) {
        sum += amp * value_noise(seed + static_cast<std::uint64_t>(o), x * freq, y * freq);
        norm += amp;
        freq *= 2.0;
        amp *= 0.5;
    }
    return sum / norm;
}

TerrainGrid generate_heightmap(std::uint64_t seed, const HeightmapParams& params) {
    if (params.size_m <= 0.0 || params.cell_size <= 0.0)
        throw std::invalid_argument("generate_heightmap: size_m and cell_size must be positive");
    if (params.octaves < 1)
        throw std::invalid_argument("generate_heightmap: octaves must be >= 1");
    if (params.base_frequency <= 0.0)
        throw std::invalid_argument("generate_heightmap: base_frequency must be positive");

    TerrainGrid grid;
    grid.seed = seed;
    grid.cell_size = params.cell_size;
    int nodes = static_cast<int>(std::llround(params.size_m / params.cell_size)) + 1;
    grid.width_cells = nodes;
    grid.height_cells = nodes;
    grid.heights.resize(static_cast<std::size_t>(nodes) * nodes);

    for (int j = 0; j < nodes; ++j) {
        for (int i = 0; i < nodes; ++i) {
            double x = i * params.cell_size;
            double y = j * params.cell_size;
            double n = params.amplitude == 0.0
                           ? 0.0
                           : fractal_value_noise(seed, x, y, params.octaves, params.base_frequency);
            grid.heights[static_cast<std::size_t>(j) * nodes + i] = params.amplitude * n;
        }
    }

    TextureRules rules;
    rules.mud_below = height_percentile(grid, 0.25);
    assign_textures(grid, rules);
    return grid;
}

double sample_height(const TerrainGrid& grid, double x, double y) {
    if (x < 0.0 || y < 0.0 || x > grid.extent_x() || y > grid.extent_y())
        throw std::domain_error("sample_height: query outside grid extent");

    double gx = x / grid.cell_size;
    double gy = y / grid.cell_size;
    int i0 = std::min(static_cast<int>(gx), grid.width_cells - 2);
    int j0 = std::min(static_cast<int>(gy), grid.height_cells - 2);
    i0 = std::max(i0, 0);
    j0 = std::max(j0, 0);
    double tx = gx - i0;
    double ty = gy - j0;

    double h00 = grid.height_at_node(i0, j0);
    double h10 = grid.height_at_node(i0 + 1, j0);
    double h01 = grid.height_at_node(i0, j0 + 1);
    double h11 = grid.height_at_node(i0 + 1, j0 + 1);

    // Weight form: exact at the corner nodes (weights are exactly 0/1 there).
    return h00 * (1.0 - tx) * (1.0 - ty) + h10 * tx * (1.0 - ty) + h01 * (1.0 - tx) * ty +
           h11 * tx * ty;
}

double slope_at(const TerrainGrid& grid, double x, double y) {
    double step = grid.cell_size;
    if (x < step || y < step || x > grid.extent_x() - step || y > grid.extent_y() - step)
        throw std::domain_error("slope_at: query must be at least one cell from the boundary");

    double dzdx = (sample_height(grid, x + step, y) - sample_height(grid, x - step, y)) / (2.0 * step);
    double dzdy = (sample_height(grid, x, y + step) - sample_height(grid, x, y - step)) / (2.0 * step);
    return std::atan(std::sqrt(dzdx * dzdx + dzdy * dzdy));
}

void assign_textures(TerrainGrid& grid, const TextureRules& rules) {
    int w = grid.width_cells;
    int h = grid.height_cells;
    grid.texture_class.resize(static_cast<std::size_t>(w) * h);

    for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
            double height = grid.height_at_node(i, j);
            TextureClass cls;
            if (height < rules.mud_below) {
                cls = TextureClass::MUD;
            } else {
                int il = std::max(i - 1, 0), ir = std::min(i + 1, w - 1);
                int jl = std::max(j - 1, 0), jr = std::min(j + 1, h - 1);
                double dzdx = (grid.height_at_node(ir, j) - grid.height_at_node(il, j)) /
                              ((ir - il) * grid.cell_size);
                double dzdy = (grid.height_at_node(i, jr) - grid.height_at_node(i, jl)) /
                              ((jr - jl) * grid.cell_size);
                double slope = std::atan(std::sqrt(dzdx * dzdx + dzdy * dzdy));
                cls = slope >= rules.roots_slope_above ? TextureClass::ROOTS : TextureClass::MOSS;
            }
            grid.texture_class[static_cast<std::size_t>(j) * w + i] = cls;
        }
    }
}

double height_percentile(const TerrainGrid& grid, double fraction) {
    std::vector<double> sorted = grid.heights;
    std::size_t k = static_cast<std::size_t>(fraction * (sorted.size() - 1));
    std::nth_element(sorted.begin(), sorted.begin() + k, sorted.end());
    return sorted[k];
}

}  // namespace sylvan
