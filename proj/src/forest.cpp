#include "sylvan/forest.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "sylvan/rng.hpp"

namespace sylvan {

namespace {

constexpr double kPi = std::numbers::pi;

struct Basis {
    Vec3 axis, u, v;
};

// Orthonormal frame around the trunk axis.
Basis trunk_basis(const TreeInstance& tree) {
    double s = std::sin(tree.lean_angle);
    Vec3 axis{s * tree.lean_axis.x, s * tree.lean_axis.y, std::cos(tree.lean_angle)};
    Vec3 u = cross(Vec3{0.0, 0.0, 1.0}, axis);
    if (length(u) < 1e-9) u = Vec3{1.0, 0.0, 0.0};
    u = normalized(u);
    Vec3 v = cross(axis, u);
    return {axis, u, v};
}

Vec3f shade(Vec3f base, double factor) {
    auto f = static_cast<float>(factor);
    return {base.x * f, base.y * f, base.z * f};
}

void append_ellipsoid(Mesh& mesh, const Vec3& center, double rx, double ry, double rz,
                      Vec3f color, MeshPart part) {
    constexpr int slices = 8;
    constexpr int stacks = 5;
    auto base = static_cast<std::uint32_t>(mesh.positions.size());
    for (int st = 0; st <= stacks; ++st) {
        double phi = kPi * st / stacks;  // 0 at top
        for (int sl = 0; sl < slices; ++sl) {
            double theta = 2.0 * kPi * sl / slices;
            Vec3 p{center.x + rx * std::sin(phi) * std::cos(theta),
                   center.y + ry * std::sin(phi) * std::sin(theta),
                   center.z + rz * std::cos(phi)};
            mesh.positions.push_back({static_cast<float>(p.x), static_cast<float>(p.y),
                                      static_cast<float>(p.z)});
            mesh.colors.push_back(color);
        }
    }
    for (int st = 0; st < stacks; ++st) {
        for (int sl = 0; sl < slices; ++sl) {
            std::uint32_t a = base + st * slices + sl;
            std::uint32_t b = base + st * slices + (sl + 1) % slices;
            std::uint32_t c = a + slices;
            std::uint32_t d = b + slices;
            mesh.indices.insert(mesh.indices.end(), {a, c, b});
            mesh.tri_part.push_back(part);
            mesh.indices.insert(mesh.indices.end(), {b, c, d});
            mesh.tri_part.push_back(part);
        }
    }
}

void append_cylinder(Mesh& mesh, const Vec3& base_center, const Basis& frame, double len,
                     double r_bottom, double r_top, int radial, int segments, Vec3f color,
                     MeshPart part, bool caps) {
    auto first = static_cast<std::uint32_t>(mesh.positions.size());
    for (int k = 0; k <= segments; ++k) {
        double s = len * k / segments;
        double r = r_bottom + (r_top - r_bottom) * (s / len);
        Vec3 c = base_center + frame.axis * s;
        for (int m = 0; m < radial; ++m) {
            double th = 2.0 * kPi * m / radial;
            Vec3 p = c + frame.u * (r * std::cos(th)) + frame.v * (r * std::sin(th));
            mesh.positions.push_back({static_cast<float>(p.x), static_cast<float>(p.y),
                                      static_cast<float>(p.z)});
            mesh.colors.push_back(color);
        }
    }
    for (int k = 0; k < segments; ++k) {
        for (int m = 0; m < radial; ++m) {
            std::uint32_t a = first + k * radial + m;
            std::uint32_t b = first + k * radial + (m + 1) % radial;
            std::uint32_t c = a + radial;
            std::uint32_t d = b + radial;
            mesh.indices.insert(mesh.indices.end(), {a, b, c});
            mesh.tri_part.push_back(part);
            mesh.indices.insert(mesh.indices.end(), {b, d, c});
            mesh.tri_part.push_back(part);
        }
    }
    if (caps) {
        Vec3 top_c = base_center + frame.axis * len;
        auto bottom_idx = static_cast<std::uint32_t>(mesh.positions.size());
        mesh.positions.push_back({static_cast<float>(base_center.x), static_cast<float>(base_center.y),
                                  static_cast<float>(base_center.z)});
        mesh.colors.push_back(color);
        auto top_idx = bottom_idx + 1;
        mesh.positions.push_back({static_cast<float>(top_c.x), static_cast<float>(top_c.y),
                                  static_cast<float>(top_c.z)});
        mesh.colors.push_back(color);
        for (int m = 0; m < radial; ++m) {
            std::uint32_t a = first + m;
            std::uint32_t b = first + (m + 1) % radial;
            mesh.indices.insert(mesh.indices.end(), {bottom_idx, b, a});
            mesh.tri_part.push_back(part);
            std::uint32_t ta = first + segments * radial + m;
            std::uint32_t tb = first + segments * radial + (m + 1) % radial;
            mesh.indices.insert(mesh.indices.end(), {top_idx, ta, tb});
            mesh.tri_part.push_back(part);
        }
    }
}

double rect_area_ha(const TerrainGrid& grid) { return grid.extent_x() * grid.extent_y() / 1e4; }

}  // namespace

const std::vector<SpeciesTemplate>& default_species_table() {
    static const std::vector<SpeciesTemplate> table = [] {
        // 17 templates: 6 base forms, re-colored/re-proportioned variants.
        struct BaseForm {
            const char* name;
            double h0, h1, d0, d1;
            int lobes;
            double cr0, cr1, ch0, ch1;
        };
        const BaseForm forms[6] = {
            {"fir", 14.0, 24.0, 0.30, 0.60, 5, 1.4, 2.6, 6.0, 10.0},
            {"beech", 12.0, 20.0, 0.30, 0.70, 6, 2.0, 3.5, 4.0, 7.0},
            {"pine", 15.0, 26.0, 0.25, 0.55, 4, 1.2, 2.2, 4.0, 7.0},
            {"spruce", 13.0, 22.0, 0.28, 0.58, 5, 1.3, 2.4, 6.0, 9.0},
            {"birch", 10.0, 18.0, 0.18, 0.40, 4, 1.2, 2.4, 3.0, 5.5},
            {"oak", 10.0, 17.0, 0.40, 0.80, 6, 2.2, 3.8, 4.0, 6.5},
        };
        std::vector<SpeciesTemplate> out;
        Rng rng(0x17c0de);
        for (int v = 0; v < 17; ++v) {
            const BaseForm& f = forms[v % 6];
            SpeciesTemplate t;
            t.name = std::string(f.name) + "_" + std::to_string(v / 6);
            double jitter = 0.9 + 0.2 * rng.uniform();
            t.trunk_height_min = f.h0 * jitter;
            t.trunk_height_max = f.h1 * jitter;
            t.dbh_min = f.d0;
            t.dbh_max = f.d1;
            t.max_lean = 0.05 + 0.12 * rng.uniform();
            t.crown_lobes = f.lobes;
            t.crown_radius_min = f.cr0;
            t.crown_radius_max = f.cr1;
            t.crown_height_min = f.ch0;
            t.crown_height_max = f.ch1;
            t.bark_color = {static_cast<float>(0.35 + 0.15 * rng.uniform()),
                            static_cast<float>(0.25 + 0.12 * rng.uniform()),
                            static_cast<float>(0.15 + 0.10 * rng.uniform())};
            t.crown_color = {static_cast<float>(0.08 + 0.10 * rng.uniform()),
                             static_cast<float>(0.28 + 0.18 * rng.uniform()),
                             static_cast<float>(0.06 + 0.10 * rng.uniform())};
            out.push_back(std::move(t));
        }
        return out;
    }();
    return table;
}

std::vector<SpeciesTemplate> load_species_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("species table: cannot open " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("species table: invalid JSON: " + std::string(e.what()));
    }
    if (!doc.contains("schema_version") || doc["schema_version"].get<int>() != 1)
        throw std::runtime_error("species table: unsupported schema_version");
    std::vector<SpeciesTemplate> out;
    for (const auto& s : doc.at("species")) {
        SpeciesTemplate t;
        t.name = s.at("name").get<std::string>();
        t.trunk_height_min = s.at("trunk_height").at(0).get<double>();
        t.trunk_height_max = s.at("trunk_height").at(1).get<double>();
        t.dbh_min = s.at("dbh").at(0).get<double>();
        t.dbh_max = s.at("dbh").at(1).get<double>();
        t.max_lean = s.at("max_lean").get<double>();
        t.crown_lobes = s.at("crown_lobes").get<int>();
        t.crown_radius_min = s.at("crown_radius").at(0).get<double>();
        t.crown_radius_max = s.at("crown_radius").at(1).get<double>();
        t.crown_height_min = s.at("crown_height").at(0).get<double>();
        t.crown_height_max = s.at("crown_height").at(1).get<double>();
        auto col = [&](const char* key, Vec3f fallback) {
            if (!s.contains(key)) return fallback;
            return Vec3f{s[key].at(0).get<float>(), s[key].at(1).get<float>(), s[key].at(2).get<float>()};
        };
        t.bark_color = col("bark_color", t.bark_color);
        t.crown_color = col("crown_color", t.crown_color);
        if (t.trunk_height_min <= 0.0 || t.dbh_min <= 0.0 || t.crown_lobes < 3 || t.crown_lobes > 6)
            throw std::runtime_error("species table: invalid template '" + t.name + "'");
        out.push_back(std::move(t));
    }
    if (out.empty()) throw std::runtime_error("species table: no species defined");
    return out;
}

std::vector<TreeInstance> place_trees(const TerrainGrid& grid, const SpawnRules& rules,
                                      const std::vector<SpeciesTemplate>& species_table,
                                      std::uint64_t rng_seed) {
    if (rules.min_spacing <= 0.0 || rules.altitude_min > rules.altitude_max)
        throw std::invalid_argument("place_trees: invalid spawn rules");

    std::vector<TreeInstance> trees;
    auto target = static_cast<std::size_t>(rules.target_density * rect_area_ha(grid));
    if (target == 0) return trees;

    Rng rng(rng_seed);
    double inset = grid.cell_size;  // keep slope_at queries legal
    double x0 = inset, x1 = grid.extent_x() - inset;
    double y0 = inset, y1 = grid.extent_y() - inset;
    std::size_t budget = 64 * target;

    for (std::size_t attempt = 0; attempt < budget && trees.size() < target; ++attempt) {
        double x = rng.uniform(x0, x1);
        double y = rng.uniform(y0, y1);
        double h = sample_height(grid, x, y);
        if (h < rules.altitude_min || h > rules.altitude_max) continue;
        if (slope_at(grid, x, y) > rules.max_slope) continue;

        bool ok = true;
        int neighbors = 0;
        for (const TreeInstance& t : trees) {
            double dx = t.base_position.x - x;
            double dy = t.base_position.y - y;
            double d2 = dx * dx + dy * dy;
            if (d2 < rules.min_spacing * rules.min_spacing) {
                ok = false;
                break;
            }
            if (d2 <= rules.neighbor_radius * rules.neighbor_radius) ++neighbors;
        }
        if (!ok || neighbors > rules.max_neighbors) continue;

        TreeInstance tree;
        tree.id = static_cast<std::uint32_t>(trees.size() + 1);
        tree.base_position = {x, y, h};
        tree.species = static_cast<int>(rng.below(species_table.size()));
        const SpeciesTemplate& sp = species_table[tree.species];
        tree.trunk_height = rng.uniform(sp.trunk_height_min, sp.trunk_height_max);
        tree.dbh = rng.uniform(sp.dbh_min, sp.dbh_max);
        double axis_angle = rng.uniform(0.0, 2.0 * kPi);
        tree.lean_axis = {std::cos(axis_angle), std::sin(axis_angle)};
        tree.lean_angle = rng.uniform(0.0, std::min(sp.max_lean, 0.25));
        tree.crown_radius = rng.uniform(sp.crown_radius_min, sp.crown_radius_max);
        tree.crown_height = rng.uniform(sp.crown_height_min, sp.crown_height_max);
        tree.color_variation = rng.uniform();
        trees.push_back(tree);
    }
    return trees;
}

std::vector<PropInstance> place_understorey(const TerrainGrid& grid,
                                            const std::array<double, kPropKindCount>& density_per_ha,
                                            std::uint64_t rng_seed) {
    std::vector<PropInstance> props;
    Rng rng(rng_seed);
    double area_ha = rect_area_ha(grid);
    for (int kind = 0; kind < kPropKindCount; ++kind) {
        auto count = static_cast<std::size_t>(density_per_ha[kind] * area_ha);
        for (std::size_t i = 0; i < count; ++i) {
            PropInstance p;
            p.kind = static_cast<PropKind>(kind);
            double x = rng.uniform(0.0, grid.extent_x());
            double y = rng.uniform(0.0, grid.extent_y());
            p.position = {x, y, sample_height(grid, x, y)};
            p.scale = rng.uniform(0.5, 1.5);
            p.yaw = rng.uniform(0.0, 2.0 * kPi);
            props.push_back(p);
        }
    }
    return props;
}

Mesh build_tree_geometry(const TreeInstance& tree, const std::vector<SpeciesTemplate>& species_table) {
    const SpeciesTemplate& sp = species_table.at(tree.species);
    Mesh mesh;
    mesh.instance_id = tree.id;

    double tint = 0.85 + 0.3 * tree.color_variation;
    Vec3f bark = shade(sp.bark_color, tint);
    Vec3f crown = shade(sp.crown_color, tint);

    Basis frame = trunk_basis(tree);
    double h = tree.trunk_height;
    double r_cut = tree.dbh / 2.0;
    double r_top = tree.dbh / 6.0;
    // Radii at the ring stations follow the linear taper anchored at the
    // felling-cut height, extrapolated down to the base.
    double slope = (r_top - r_cut) / (h - kFellingCutHeight);
    double r_base = r_cut + slope * (0.0 - kFellingCutHeight);
    append_cylinder(mesh, tree.base_position, frame, h, r_base, r_top, 12, 8, bark,
                    MeshPart::TRUNK, true);

    // Crown lobes along the upper trunk; layout is a pure function of the
    // instance so rebuilding yields identical geometry.
    Rng rng(derive_seed(derive_seed(0x5eedcafeULL, tree.id), static_cast<std::uint64_t>(tree.species)));
    int lobes = std::min(6, std::max(3, sp.crown_lobes));
    for (int l = 0; l < lobes; ++l) {
        double s = rng.uniform(0.6, 0.95) * h;
        double off_angle = rng.uniform(0.0, 2.0 * kPi);
        double off_r = rng.uniform(0.0, 0.35) * tree.crown_radius;
        Vec3 center = tree.base_position + frame.axis * s +
                      frame.u * (off_r * std::cos(off_angle)) + frame.v * (off_r * std::sin(off_angle));
        double rx = tree.crown_radius * rng.uniform(0.6, 1.0);
        double ry = tree.crown_radius * rng.uniform(0.6, 1.0);
        double rz = tree.crown_height * 0.5 * rng.uniform(0.5, 0.9);
        append_ellipsoid(mesh, center, rx, ry, rz, shade(crown, rng.uniform(0.85, 1.1)),
                         MeshPart::CROWN);
    }
    return mesh;
}

Mesh build_prop_geometry(const PropInstance& prop) {
    Mesh mesh;
    double s = prop.scale;
    Basis up{{0.0, 0.0, 1.0}, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
    switch (prop.kind) {
        case PropKind::GRASS: {
            // Two crossed quads.
            Vec3f green{0.20f, 0.45f, 0.12f};
            double half = 0.18 * s, ht = 0.35 * s;
            for (int q = 0; q < 2; ++q) {
                double a = prop.yaw + q * kPi / 2.0;
                Vec3 d{std::cos(a), std::sin(a), 0.0};
                auto base = static_cast<std::uint32_t>(mesh.positions.size());
                Vec3 p0 = prop.position - d * half;
                Vec3 p1 = prop.position + d * half;
                for (const Vec3& p : {p0, p1}) {
                    mesh.positions.push_back({static_cast<float>(p.x), static_cast<float>(p.y),
                                              static_cast<float>(p.z)});
                    mesh.positions.push_back({static_cast<float>(p.x), static_cast<float>(p.y),
                                              static_cast<float>(p.z + ht)});
                    mesh.colors.push_back(green);
                    mesh.colors.push_back(green);
                }
                mesh.indices.insert(mesh.indices.end(), {base, base + 2, base + 1});
                mesh.indices.insert(mesh.indices.end(), {base + 1, base + 2, base + 3});
                mesh.tri_part.push_back(MeshPart::OTHER);
                mesh.tri_part.push_back(MeshPart::OTHER);
            }
            break;
        }
        case PropKind::STUMP:
            append_cylinder(mesh, prop.position, up, 0.30 * s, 0.16 * s, 0.15 * s, 8, 1,
                            {0.40f, 0.30f, 0.20f}, MeshPart::OTHER, true);
            break;
        case PropKind::SCRUB:
            append_ellipsoid(mesh, prop.position + Vec3{0.0, 0.0, 0.25 * s}, 0.45 * s, 0.45 * s,
                             0.30 * s, {0.16f, 0.36f, 0.10f}, MeshPart::OTHER);
            break;
        case PropKind::BRANCH: {
            Basis along{{std::cos(prop.yaw), std::sin(prop.yaw), 0.0},
                        {-std::sin(prop.yaw), std::cos(prop.yaw), 0.0},
                        {0.0, 0.0, 1.0}};
            Vec3 start = prop.position + Vec3{0.0, 0.0, 0.04 * s} - along.axis * (0.5 * s);
            append_cylinder(mesh, start, along, 1.0 * s, 0.04 * s, 0.03 * s, 6, 1,
                            {0.38f, 0.28f, 0.18f}, MeshPart::OTHER, true);
            break;
        }
    }
    return mesh;
}

std::array<Vec3, kKeypointCount> tree_keypoints_3d(const TreeInstance& tree, const Vec3& view_dir) {
    Vec3 vh{view_dir.x, view_dir.y, 0.0};
    double n = length(vh);
    if (n < 1e-12) throw std::domain_error("tree_keypoints_3d: view direction has no horizontal component");
    vh = vh * (1.0 / n);

    Basis frame = trunk_basis(tree);
    Vec3 cut = tree.base_position + frame.axis * kFellingCutHeight;
    Vec3 middle = tree.base_position + frame.axis * (tree.trunk_height / 2.0);
    Vec3 top = tree.base_position + frame.axis * tree.trunk_height;

    // Screen-right for a camera looking along vh with +z up.
    Vec3 right_h{vh.y, -vh.x, 0.0};
    double r = tree.dbh / 2.0;
    Vec3 left = cut - right_h * r;
    Vec3 right = cut + right_h * r;

    return {cut, left, right, middle, top};
}

}  // namespace sylvan
