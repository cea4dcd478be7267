#include "sylvan/render.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sylvan/rng.hpp"

namespace sylvan {

namespace {

constexpr double kNearPlane = 0.05;
constexpr double kShadowBias = 0.30;  // meters; absorbs 12.5 cm shadow texels on slopes

Vec3 to_vec3(const Vec3f& v) { return {v.x, v.y, v.z}; }

std::uint8_t quantize(double c) {
    double v = std::round(255.0 * c);
    return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
}

}  // namespace

CameraBasis camera_basis(const CameraPose& camera) {
    double cy = std::cos(camera.yaw), sy = std::sin(camera.yaw);
    double cp = std::cos(camera.pitch), sp = std::sin(camera.pitch);
    Vec3 forward{cp * cy, cp * sy, sp};
    Vec3 right{sy, -cy, 0.0};
    Vec3 down = cross(forward, right);
    return {right, down, forward};
}

ProjectedPoint project_point(const CameraPose& camera, const Vec3& world) {
    CameraBasis basis = camera_basis(camera);
    Vec3 d = world - camera.position;
    double x = dot(d, basis.right);
    double y = dot(d, basis.down);
    double z = dot(d, basis.forward);
    ProjectedPoint out;
    out.view_z = z;
    out.in_front = z > 1e-9;
    out.distance = length(d);
    if (out.in_front) {
        double f = camera.focal_px();
        out.u = (camera.width - 1) / 2.0 + f * x / z;
        out.v = (camera.height - 1) / 2.0 + f * y / z;
    }
    return out;
}

Vec3 pixel_ray(const CameraPose& camera, double px, double py) {
    CameraBasis basis = camera_basis(camera);
    double f = camera.focal_px();
    double uc = (px - (camera.width - 1) / 2.0) / f;
    double vc = (py - (camera.height - 1) / 2.0) / f;
    return normalized(basis.right * uc + basis.down * vc + basis.forward);
}

const SunPreset& sun_preset(TimeOfDay tod) {
    static const SunPreset presets[4] = {
        // MORNING: low warm sun from the east
        {15.0 * M_PI / 180.0, 90.0 * M_PI / 180.0, {1.00, 0.87, 0.70}, 0.90, 0.35,
         {0.85, 0.75, 0.65}, {0.45, 0.60, 0.80}},
        // DAYLIGHT: high neutral sun
        {55.0 * M_PI / 180.0, 180.0 * M_PI / 180.0, {1.00, 1.00, 1.00}, 1.00, 0.40,
         {0.80, 0.85, 0.92}, {0.35, 0.55, 0.90}},
        // EVENING: low orange sun from the west
        {10.0 * M_PI / 180.0, 270.0 * M_PI / 180.0, {1.00, 0.62, 0.35}, 0.80, 0.30,
         {0.95, 0.65, 0.45}, {0.30, 0.35, 0.55}},
        // DUSK: near-horizon blue-gray, low intensity
        {2.0 * M_PI / 180.0, 300.0 * M_PI / 180.0, {0.55, 0.60, 0.75}, 0.35, 0.22,
         {0.35, 0.35, 0.45}, {0.10, 0.12, 0.20}},
    };
    return presets[static_cast<int>(tod)];
}

bool ShadowMap::lit(const Vec3& world, double bias) const {
    double su = (dot(world, axis_u) - min_u) * scale_u;
    double sv = (dot(world, axis_v) - min_v) * scale_v;
    int x = static_cast<int>(std::lround(su));
    int y = static_cast<int>(std::lround(sv));
    if (x < 0 || y < 0 || x >= size || y >= size) return true;
    double d = dot(world, dir);
    return d <= depth[static_cast<std::size_t>(y) * size + x] + bias;
}

namespace {

Vec3 sun_direction(const SunPreset& p) {
    // Unit vector pointing toward the sun.
    return {std::cos(p.elevation) * std::cos(p.azimuth), std::cos(p.elevation) * std::sin(p.azimuth),
            std::sin(p.elevation)};
}

ShadowMap build_shadow_map(const Scene& scene, const SunPreset& preset) {
    ShadowMap map;
    Vec3 sun = sun_direction(preset);
    map.dir = sun * -1.0;
    Vec3 u = cross(map.dir, Vec3{0.0, 0.0, 1.0});
    if (length(u) < 1e-9) u = Vec3{1.0, 0.0, 0.0};
    map.axis_u = normalized(u);
    map.axis_v = normalized(cross(map.dir, map.axis_u));

    double min_u = 1e30, max_u = -1e30, min_v = 1e30, max_v = -1e30;
    for (int corner = 0; corner < 8; ++corner) {
        Vec3 p{(corner & 1) ? scene.scene_max.x : scene.scene_min.x,
               (corner & 2) ? scene.scene_max.y : scene.scene_min.y,
               (corner & 4) ? scene.scene_max.z : scene.scene_min.z};
        min_u = std::min(min_u, dot(p, map.axis_u));
        max_u = std::max(max_u, dot(p, map.axis_u));
        min_v = std::min(min_v, dot(p, map.axis_v));
        max_v = std::max(max_v, dot(p, map.axis_v));
    }
    map.min_u = min_u - 1.0;
    map.min_v = min_v - 1.0;
    map.scale_u = (map.size - 1) / std::max(1e-6, max_u - min_u + 2.0);
    map.scale_v = (map.size - 1) / std::max(1e-6, max_v - min_v + 2.0);
    map.depth.assign(static_cast<std::size_t>(map.size) * map.size,
                     std::numeric_limits<float>::infinity());

    for (const Mesh& mesh : scene.meshes) {
        for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
            Vec3 p[3];
            double px[3], py[3], pd[3];
            for (int k = 0; k < 3; ++k) {
                p[k] = to_vec3(mesh.positions[mesh.indices[3 * t + k]]);
                px[k] = (dot(p[k], map.axis_u) - map.min_u) * map.scale_u;
                py[k] = (dot(p[k], map.axis_v) - map.min_v) * map.scale_v;
                pd[k] = dot(p[k], map.dir);
            }
            double area = (px[1] - px[0]) * (py[2] - py[0]) - (py[1] - py[0]) * (px[2] - px[0]);
            if (std::abs(area) < 1e-12) continue;
            if (area < 0) {
                std::swap(px[1], px[2]);
                std::swap(py[1], py[2]);
                std::swap(pd[1], pd[2]);
                area = -area;
            }
            int xmin = std::max(0, static_cast<int>(std::ceil(std::min({px[0], px[1], px[2]}))));
            int xmax = std::min(map.size - 1, static_cast<int>(std::floor(std::max({px[0], px[1], px[2]}))));
            int ymin = std::max(0, static_cast<int>(std::ceil(std::min({py[0], py[1], py[2]}))));
            int ymax = std::min(map.size - 1, static_cast<int>(std::floor(std::max({py[0], py[1], py[2]}))));
            for (int y = ymin; y <= ymax; ++y) {
                for (int x = xmin; x <= xmax; ++x) {
                    double e0 = (px[2] - px[1]) * (y - py[1]) - (py[2] - py[1]) * (x - px[1]);
                    double e1 = (px[0] - px[2]) * (y - py[2]) - (py[0] - py[2]) * (x - px[2]);
                    double e2 = (px[1] - px[0]) * (y - py[0]) - (py[1] - py[0]) * (x - px[0]);
                    if (e0 < 0 || e1 < 0 || e2 < 0) continue;
                    double d = (e0 * pd[0] + e1 * pd[1] + e2 * pd[2]) / area;
                    float& dst = map.depth[static_cast<std::size_t>(y) * map.size + x];
                    if (d < dst) dst = static_cast<float>(d);
                }
            }
        }
    }
    return map;
}

struct VertexAttr {
    Vec3 cam;    // camera-space position
    Vec3 world;
    Vec3 color;
};

// Clips a camera-space triangle against z = kNearPlane. Returns 0, 3 or 4
// vertices (a fan around out[0]).
int clip_near(const VertexAttr in[3], VertexAttr out[4]) {
    int n = 0;
    for (int i = 0; i < 3; ++i) {
        const VertexAttr& a = in[i];
        const VertexAttr& b = in[(i + 1) % 3];
        bool ain = a.cam.z >= kNearPlane;
        bool bin = b.cam.z >= kNearPlane;
        if (ain) out[n++] = a;
        if (ain != bin) {
            double t = (kNearPlane - a.cam.z) / (b.cam.z - a.cam.z);
            VertexAttr v;
            v.cam = a.cam + (b.cam - a.cam) * t;
            v.world = a.world + (b.world - a.world) * t;
            v.color = a.color + (b.color - a.color) * t;
            out[n++] = v;
        }
    }
    return n;
}

struct RenderTarget {
    int width, height;
    std::vector<float> zbuf;            // camera-space z; +inf = sky
    std::vector<std::uint32_t> ids;
    std::vector<std::uint8_t> part;
    std::vector<std::uint8_t> up_mask;
    std::vector<double> rgbf;           // linear color, 3 per pixel
};

struct ShadingContext {
    Vec3 sun_dir;      // toward the sun
    Vec3 sun_color;
    double sun_power;  // intensity * sun_scale
    double ambient;
    const ShadowMap* shadow;
};

void raster_triangle(RenderTarget& rt, const CameraPose& camera, const ShadingContext& shading,
                     const VertexAttr verts[3], std::uint32_t instance_id, MeshPart part) {
    // Face normal in world space, flipped toward the camera (two-sided).
    Vec3 face_n = normalized(cross(verts[1].world - verts[0].world, verts[2].world - verts[0].world));
    if (dot(face_n, camera.position - verts[0].world) < 0.0) face_n = face_n * -1.0;
    double lambert = std::max(0.0, dot(face_n, shading.sun_dir));
    bool upward = face_n.z > 0.6 && part != MeshPart::TRUNK;

    VertexAttr clipped[4];
    int n = clip_near(verts, clipped);
    if (n < 3) return;

    double f = camera.focal_px();
    double cx = (camera.width - 1) / 2.0;
    double cy = (camera.height - 1) / 2.0;

    for (int fan = 0; fan < n - 2; ++fan) {
        const VertexAttr* tv[3] = {&clipped[0], &clipped[fan + 1], &clipped[fan + 2]};
        double sx[3], sy[3];
        for (int k = 0; k < 3; ++k) {
            sx[k] = cx + f * tv[k]->cam.x / tv[k]->cam.z;
            sy[k] = cy + f * tv[k]->cam.y / tv[k]->cam.z;
        }
        double area = (sx[1] - sx[0]) * (sy[2] - sy[0]) - (sy[1] - sy[0]) * (sx[2] - sx[0]);
        if (std::abs(area) < 1e-12) continue;
        if (area < 0) {
            std::swap(sx[1], sx[2]);
            std::swap(sy[1], sy[2]);
            std::swap(tv[1], tv[2]);
            area = -area;
        }
        int xmin = std::max(0, static_cast<int>(std::ceil(std::min({sx[0], sx[1], sx[2]}))));
        int xmax = std::min(rt.width - 1, static_cast<int>(std::floor(std::max({sx[0], sx[1], sx[2]}))));
        int ymin = std::max(0, static_cast<int>(std::ceil(std::min({sy[0], sy[1], sy[2]}))));
        int ymax = std::min(rt.height - 1, static_cast<int>(std::floor(std::max({sy[0], sy[1], sy[2]}))));
        if (xmin > xmax || ymin > ymax) continue;

        double inv_z[3] = {1.0 / tv[0]->cam.z, 1.0 / tv[1]->cam.z, 1.0 / tv[2]->cam.z};

        for (int y = ymin; y <= ymax; ++y) {
            for (int x = xmin; x <= xmax; ++x) {
                double e0 = (sx[2] - sx[1]) * (y - sy[1]) - (sy[2] - sy[1]) * (x - sx[1]);
                double e1 = (sx[0] - sx[2]) * (y - sy[2]) - (sy[0] - sy[2]) * (x - sx[2]);
                double e2 = (sx[1] - sx[0]) * (y - sy[0]) - (sy[1] - sy[0]) * (x - sx[0]);
                if (e0 < 0 || e1 < 0 || e2 < 0) continue;
                double b0 = e0 / area, b1 = e1 / area, b2 = e2 / area;
                double izw = b0 * inv_z[0] + b1 * inv_z[1] + b2 * inv_z[2];
                double z = 1.0 / izw;
                std::size_t idx = static_cast<std::size_t>(y) * rt.width + x;
                float& zdst = rt.zbuf[idx];
                // Deterministic tie rule: at exactly equal depth the lower
                // instance id wins.
                auto zf = static_cast<float>(z);
                if (zf > zdst || (zf == zdst && instance_id >= rt.ids[idx])) continue;

                double w0 = b0 * inv_z[0] * z, w1 = b1 * inv_z[1] * z, w2 = b2 * inv_z[2] * z;
                Vec3 color = tv[0]->color * w0 + tv[1]->color * w1 + tv[2]->color * w2;
                Vec3 world = tv[0]->world * w0 + tv[1]->world * w1 + tv[2]->world * w2;

                double direct = 0.0;
                if (shading.sun_power > 0.0 && lambert > 0.0) {
                    bool lit = shading.shadow == nullptr || shading.shadow->lit(world, kShadowBias);
                    if (lit) direct = shading.sun_power * lambert;
                }
                rt.zbuf[idx] = zf;
                rt.ids[idx] = instance_id;
                rt.part[idx] = static_cast<std::uint8_t>(part);
                rt.up_mask[idx] = upward ? 1 : 0;
                rt.rgbf[3 * idx + 0] = color.x * (shading.ambient + direct * shading.sun_color.x);
                rt.rgbf[3 * idx + 1] = color.y * (shading.ambient + direct * shading.sun_color.y);
                rt.rgbf[3 * idx + 2] = color.z * (shading.ambient + direct * shading.sun_color.z);
            }
        }
    }
}

bool mesh_visible(const CameraPose& camera, const std::array<Vec3, 2>& bounds) {
    CameraBasis basis = camera_basis(camera);
    double f = camera.focal_px();
    double cx = (camera.width - 1) / 2.0;
    double cy = (camera.height - 1) / 2.0;
    bool any_front = false;
    bool any_near = false;
    double min_u = 1e30, max_u = -1e30, min_v = 1e30, max_v = -1e30;
    for (int corner = 0; corner < 8; ++corner) {
        Vec3 p{(corner & 1) ? bounds[1].x : bounds[0].x, (corner & 2) ? bounds[1].y : bounds[0].y,
               (corner & 4) ? bounds[1].z : bounds[0].z};
        Vec3 d = p - camera.position;
        double z = dot(d, basis.forward);
        if (z <= kNearPlane) {
            any_near = true;
            continue;
        }
        any_front = true;
        double u = cx + f * dot(d, basis.right) / z;
        double v = cy + f * dot(d, basis.down) / z;
        min_u = std::min(min_u, u);
        max_u = std::max(max_u, u);
        min_v = std::min(min_v, v);
        max_v = std::max(max_v, v);
    }
    if (!any_front) return false;
    if (any_near) return true;  // straddles the near plane; keep conservatively
    return max_u >= -1.0 && min_u <= camera.width && max_v >= -1.0 && min_v <= camera.height;
}

}  // namespace

Mesh build_terrain_mesh(const TerrainGrid& grid) {
    Mesh mesh;
    int w = grid.width_cells, h = grid.height_cells;
    mesh.positions.reserve(static_cast<std::size_t>(w) * h);
    for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
            mesh.positions.push_back({static_cast<float>(i * grid.cell_size),
                                      static_cast<float>(j * grid.cell_size),
                                      static_cast<float>(grid.height_at_node(i, j))});
            Vec3f base;
            switch (grid.texture_at_node(i, j)) {
                case TextureClass::MOSS: base = {0.25f, 0.40f, 0.18f}; break;
                case TextureClass::ROOTS: base = {0.42f, 0.34f, 0.24f}; break;
                case TextureClass::MUD: base = {0.35f, 0.28f, 0.20f}; break;
            }
            double tint = 0.9 + 0.2 * (static_cast<double>(hash_lattice(grid.seed ^ 0x7e44a1, i, j) >> 40) /
                                       static_cast<double>(1 << 24));
            mesh.colors.push_back({static_cast<float>(base.x * tint), static_cast<float>(base.y * tint),
                                   static_cast<float>(base.z * tint)});
        }
    }
    for (int j = 0; j + 1 < h; ++j) {
        for (int i = 0; i + 1 < w; ++i) {
            auto a = static_cast<std::uint32_t>(j * w + i);
            auto b = a + 1;
            auto c = a + w;
            auto d = c + 1;
            mesh.indices.insert(mesh.indices.end(), {a, b, c});
            mesh.indices.insert(mesh.indices.end(), {b, d, c});
            mesh.tri_part.push_back(MeshPart::OTHER);
            mesh.tri_part.push_back(MeshPart::OTHER);
        }
    }
    return mesh;
}

namespace {

std::array<Vec3, 2> mesh_aabb(const Mesh& mesh) {
    Vec3 lo{1e30, 1e30, 1e30}, hi{-1e30, -1e30, -1e30};
    for (const Vec3f& p : mesh.positions) {
        lo.x = std::min(lo.x, static_cast<double>(p.x));
        lo.y = std::min(lo.y, static_cast<double>(p.y));
        lo.z = std::min(lo.z, static_cast<double>(p.z));
        hi.x = std::max(hi.x, static_cast<double>(p.x));
        hi.y = std::max(hi.y, static_cast<double>(p.y));
        hi.z = std::max(hi.z, static_cast<double>(p.z));
    }
    return {lo, hi};
}

// Terrain split into 16x16-cell patches so frustum culling has something to
// work with.
void append_terrain_patches(Scene& scene, const TerrainGrid& grid) {
    Mesh full = build_terrain_mesh(grid);
    constexpr int patch = 16;
    int cells_x = grid.width_cells - 1, cells_y = grid.height_cells - 1;
    for (int pj = 0; pj < cells_y; pj += patch) {
        for (int pi = 0; pi < cells_x; pi += patch) {
            Mesh m;
            int pj1 = std::min(pj + patch, cells_y);
            int pi1 = std::min(pi + patch, cells_x);
            std::vector<std::int32_t> remap(full.positions.size(), -1);
            for (int j = pj; j < pj1; ++j) {
                for (int i = pi; i < pi1; ++i) {
                    std::uint32_t quad[6] = {
                        static_cast<std::uint32_t>(j * grid.width_cells + i),
                        static_cast<std::uint32_t>(j * grid.width_cells + i + 1),
                        static_cast<std::uint32_t>((j + 1) * grid.width_cells + i),
                        static_cast<std::uint32_t>(j * grid.width_cells + i + 1),
                        static_cast<std::uint32_t>((j + 1) * grid.width_cells + i + 1),
                        static_cast<std::uint32_t>((j + 1) * grid.width_cells + i),
                    };
                    for (std::uint32_t src : quad) {
                        if (remap[src] < 0) {
                            remap[src] = static_cast<std::int32_t>(m.positions.size());
                            m.positions.push_back(full.positions[src]);
                            m.colors.push_back(full.colors[src]);
                        }
                        m.indices.push_back(static_cast<std::uint32_t>(remap[src]));
                    }
                    m.tri_part.push_back(MeshPart::OTHER);
                    m.tri_part.push_back(MeshPart::OTHER);
                }
            }
            scene.meshes.push_back(std::move(m));
        }
    }
}

}  // namespace

std::shared_ptr<const ShadowMap> Scene::shadow_map(TimeOfDay tod) const {
    auto idx = static_cast<int>(tod);
    std::lock_guard<std::mutex> lock(shadow_cache->mutex);
    if (!shadow_cache->maps[idx]) {
        shadow_cache->maps[idx] =
            std::make_shared<const ShadowMap>(build_shadow_map(*this, sun_preset(tod)));
    }
    return shadow_cache->maps[idx];
}

Scene build_scene(const TerrainGrid& grid, std::vector<TreeInstance> trees,
                  const std::vector<PropInstance>& props,
                  const std::vector<SpeciesTemplate>& species_table) {
    Scene scene;
    scene.grid = &grid;
    scene.trees = std::move(trees);
    scene.shadow_cache = std::make_shared<ShadowCache>();

    append_terrain_patches(scene, grid);
    for (const PropInstance& prop : props) scene.meshes.push_back(build_prop_geometry(prop));
    for (const TreeInstance& tree : scene.trees)
        scene.meshes.push_back(build_tree_geometry(tree, species_table));

    scene.scene_min = {1e30, 1e30, 1e30};
    scene.scene_max = {-1e30, -1e30, -1e30};
    for (const Mesh& mesh : scene.meshes) {
        auto bb = mesh_aabb(mesh);
        scene.mesh_bounds.push_back(bb);
        scene.scene_min.x = std::min(scene.scene_min.x, bb[0].x);
        scene.scene_min.y = std::min(scene.scene_min.y, bb[0].y);
        scene.scene_min.z = std::min(scene.scene_min.z, bb[0].z);
        scene.scene_max.x = std::max(scene.scene_max.x, bb[1].x);
        scene.scene_max.y = std::max(scene.scene_max.y, bb[1].y);
        scene.scene_max.z = std::max(scene.scene_max.z, bb[1].z);
    }
    return scene;
}

CameraPose place_camera(const TerrainGrid& grid, std::uint64_t rng_seed, const CameraConfig& config) {
    Rng rng(rng_seed);
    double ex = grid.extent_x(), ey = grid.extent_y();
    CameraPose pose;
    double x = rng.uniform(ex / 4.0, 3.0 * ex / 4.0);
    double y = rng.uniform(ey / 4.0, 3.0 * ey / 4.0);
    double eye = rng.uniform(config.height_min, config.height_max);
    pose.position = {x, y, sample_height(grid, x, y) + eye};
    pose.yaw = rng.uniform(0.0, 2.0 * M_PI);
    pose.pitch = rng.uniform(config.pitch_min, config.pitch_max);
    pose.vertical_fov = config.vertical_fov;
    pose.width = config.width;
    pose.height = config.height;
    return pose;
}

FrameBundle render_frame(const Scene& scene, const CameraPose& camera, const Conditions& conditions) {
    const SunPreset& preset = sun_preset(conditions.time_of_day);
    int w = camera.width, h = camera.height;

    RenderTarget rt;
    rt.width = w;
    rt.height = h;
    rt.zbuf.assign(static_cast<std::size_t>(w) * h, std::numeric_limits<float>::infinity());
    rt.ids.assign(static_cast<std::size_t>(w) * h, 0);
    rt.part.assign(static_cast<std::size_t>(w) * h, 0);
    rt.up_mask.assign(static_cast<std::size_t>(w) * h, 0);
    rt.rgbf.assign(static_cast<std::size_t>(w) * h * 3, 0.0);

    // Sky prepass.
    CameraBasis basis = camera_basis(camera);
    double f = camera.focal_px();
    double cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            Vec3 dir = normalized(basis.right * ((x - cx) / f) + basis.down * ((y - cy) / f) +
                                  basis.forward);
            double t = std::clamp(dir.z, 0.0, 1.0);
            std::size_t idx = static_cast<std::size_t>(y) * w + x;
            rt.rgbf[3 * idx + 0] = preset.sky_horizon.x + (preset.sky_zenith.x - preset.sky_horizon.x) * t;
            rt.rgbf[3 * idx + 1] = preset.sky_horizon.y + (preset.sky_zenith.y - preset.sky_horizon.y) * t;
            rt.rgbf[3 * idx + 2] = preset.sky_horizon.z + (preset.sky_zenith.z - preset.sky_horizon.z) * t;
        }
    }

    ShadingContext shading;
    shading.sun_dir = sun_direction(preset);
    shading.sun_color = preset.color;
    shading.sun_power = preset.intensity * conditions.sun_scale;
    shading.ambient = preset.ambient;
    std::shared_ptr<const ShadowMap> shadow;
    if (shading.sun_power > 0.0 && !scene.meshes.empty()) {
        shadow = scene.shadow_map(conditions.time_of_day);
        shading.shadow = shadow.get();
    } else {
        shading.shadow = nullptr;
    }

    for (std::size_t m = 0; m < scene.meshes.size(); ++m) {
        const Mesh& mesh = scene.meshes[m];
        if (!mesh_visible(camera, scene.mesh_bounds[m])) continue;
        for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
            VertexAttr verts[3];
            bool all_behind = true;
            for (int k = 0; k < 3; ++k) {
                Vec3 p = to_vec3(mesh.positions[mesh.indices[3 * t + k]]);
                Vec3 d = p - camera.position;
                verts[k].world = p;
                verts[k].cam = {dot(d, basis.right), dot(d, basis.down), dot(d, basis.forward)};
                verts[k].color = to_vec3(mesh.colors[mesh.indices[3 * t + k]]);
                if (verts[k].cam.z >= kNearPlane) all_behind = false;
            }
            if (all_behind) continue;
            raster_triangle(rt, camera, shading, verts, mesh.instance_id, mesh.tri_part[t]);
        }
    }

    FrameBundle frame;
    frame.width = w;
    frame.height = h;
    frame.camera = camera;
    frame.conditions = conditions;
    frame.instance_id = std::move(rt.ids);
    frame.part = std::move(rt.part);
    frame.up_mask = std::move(rt.up_mask);
    frame.depth_m.assign(static_cast<std::size_t>(w) * h, std::numeric_limits<float>::infinity());
    frame.rgb.resize(static_cast<std::size_t>(w) * h * 3);

    for (int y = 0; y < h; ++y) {
        double vc = (y - cy) / f;
        for (int x = 0; x < w; ++x) {
            std::size_t idx = static_cast<std::size_t>(y) * w + x;
            float z = rt.zbuf[idx];
            if (std::isfinite(z)) {
                double uc = (x - cx) / f;
                // View z -> metric distance along the pixel ray.
                frame.depth_m[idx] = static_cast<float>(z * std::sqrt(1.0 + uc * uc + vc * vc));
            }
            frame.rgb[3 * idx + 0] = quantize(rt.rgbf[3 * idx + 0]);
            frame.rgb[3 * idx + 1] = quantize(rt.rgbf[3 * idx + 1]);
            frame.rgb[3 * idx + 2] = quantize(rt.rgbf[3 * idx + 2]);
        }
    }

    apply_weather(frame.rgb, frame.depth_m, w, h, conditions, &frame.up_mask);
    return frame;
}

std::vector<std::uint8_t> encode_depth(const std::vector<float>& depth_m, double d_max) {
    if (d_max <= 0.0) throw std::invalid_argument("encode_depth: d_max must be positive");
    std::vector<std::uint8_t> out(depth_m.size());
    for (std::size_t i = 0; i < depth_m.size(); ++i) {
        double d = depth_m[i];
        double frac = std::isfinite(d) ? std::clamp(d / d_max, 0.0, 1.0) : 1.0;
        out[i] = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - frac)));
    }
    return out;
}

void apply_weather(std::vector<std::uint8_t>& rgb, const std::vector<float>& depth_m, int width,
                   int height, const Conditions& conditions,
                   const std::vector<std::uint8_t>* up_mask) {
    std::size_t n = static_cast<std::size_t>(width) * height;

    if (conditions.wet) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(depth_m[i])) continue;
            for (int c = 0; c < 3; ++c)
                rgb[3 * i + c] = static_cast<std::uint8_t>(std::lround(rgb[3 * i + c] * 0.7));
        }
    }

    if (conditions.snow_cover > 0.0 && up_mask != nullptr) {
        double k = std::clamp(conditions.snow_cover, 0.0, 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (!(*up_mask)[i]) continue;
            for (int c = 0; c < 3; ++c) {
                double b = rgb[3 * i + c];
                rgb[3 * i + c] = static_cast<std::uint8_t>(std::lround(b + (255.0 - b) * k));
            }
        }
    }

    if (conditions.fog_density > 0.0) {
        const SunPreset& preset = sun_preset(conditions.time_of_day);
        double fog[3] = {255.0 * preset.sky_horizon.x, 255.0 * preset.sky_horizon.y,
                         255.0 * preset.sky_horizon.z};
        for (std::size_t i = 0; i < n; ++i) {
            double d = depth_m[i];
            if (!std::isfinite(d)) continue;  // sky is already at horizon color
            double factor = 1.0 - std::exp(-conditions.fog_density * d);
            for (int c = 0; c < 3; ++c) {
                double b = rgb[3 * i + c];
                rgb[3 * i + c] =
                    static_cast<std::uint8_t>(std::clamp(std::lround(b + (fog[c] - b) * factor), 0L, 255L));
            }
        }
    }

    if ((conditions.weather == Weather::RAIN || conditions.weather == Weather::SNOW) &&
        conditions.precipitation_intensity > 0.0) {
        Rng rng(derive_seed(0xa17e5ULL, conditions.overlay_seed));
        auto blend_px = [&](int x, int y, double br, double alpha) {
            if (x < 0 || y < 0 || x >= width || y >= height) return;
            std::size_t i = static_cast<std::size_t>(y) * width + x;
            for (int c = 0; c < 3; ++c) {
                double b = rgb[3 * i + c];
                rgb[3 * i + c] = static_cast<std::uint8_t>(std::lround(b + (br - b) * alpha));
            }
        };
        if (conditions.weather == Weather::RAIN) {
            auto count = static_cast<int>(conditions.precipitation_intensity * width * height / 400.0);
            for (int s = 0; s < count; ++s) {
                int x = static_cast<int>(rng.below(width));
                int y = static_cast<int>(rng.below(height));
                int len = 8 + static_cast<int>(rng.below(12));
                double slant = rng.uniform(-0.4, 0.4);
                for (int k = 0; k < len; ++k)
                    blend_px(x + static_cast<int>(std::lround(slant * k)), y + k, 225.0, 0.35);
            }
        } else {
            auto count = static_cast<int>(conditions.precipitation_intensity * width * height / 700.0);
            for (int s = 0; s < count; ++s) {
                int x = static_cast<int>(rng.below(width));
                int y = static_cast<int>(rng.below(height));
                blend_px(x, y, 250.0, 0.8);
                blend_px(x + 1, y, 250.0, 0.5);
                blend_px(x, y + 1, 250.0, 0.5);
            }
        }
    }
}

}  // namespace sylvan
