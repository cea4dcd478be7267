#pragma once

#include <cstdint>
#include <vector>

namespace sylvan {

struct Vec3f {
    float x = 0.f, y = 0.f, z = 0.f;
};

enum class MeshPart : std::uint8_t { OTHER = 0, TRUNK = 1, CROWN = 2 };

/// Triangle mesh with per-vertex albedo. All triangles of a mesh belong to
/// one object instance; trees carry instance_id > 0, terrain and props 0.
struct Mesh {
    std::vector<Vec3f> positions;
    std::vector<Vec3f> colors;
    std::vector<std::uint32_t> indices;   // 3 per triangle
    std::vector<MeshPart> tri_part;       // one per triangle
    std::uint32_t instance_id = 0;

    std::size_t triangle_count() const { return indices.size() / 3; }
};

}  // namespace sylvan
