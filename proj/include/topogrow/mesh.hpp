#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "topogrow/vec3.hpp"

namespace topogrow {

struct TopologySummary {
    std::int64_t vertex_count = 0;
    std::int64_t edge_count = 0;
    std::int64_t face_count = 0;
    std::int64_t euler_characteristic = 0;
    int genus = -1;  ///< -1 when undefined (disconnected mesh)
    int component_count = 0;
};

/// Closed, oriented, manifold triangle surface. Immutable after construction;
/// `create` validates:
///   - face indices in range, every vertex referenced,
///   - no zero-area faces,
///   - every directed edge occurs exactly once and its reverse exactly once
///     (closed 2-manifold with globally consistent winding).
class TriangleMesh {
public:
    using Face = std::array<std::int32_t, 3>;

    static TriangleMesh create(std::vector<Vec3> vertices, std::vector<Face> faces);

    /// Same connectivity, new vertex positions. Skips connectivity validation;
    /// positions must keep faces non-degenerate.
    TriangleMesh with_positions(std::vector<Vec3> positions) const;

    const std::vector<Vec3>& vertices() const { return vertices_; }
    const std::vector<Face>& faces() const { return faces_; }
    std::int64_t vertex_count() const { return static_cast<std::int64_t>(vertices_.size()); }
    std::int64_t face_count() const { return static_cast<std::int64_t>(faces_.size()); }
    std::int64_t edge_count() const { return edge_count_; }
    int component_count() const { return component_count_; }

    Vec3 bbox_min() const;
    Vec3 bbox_max() const;

private:
    TriangleMesh() = default;
    std::vector<Vec3> vertices_;
    std::vector<Face> faces_;
    std::int64_t edge_count_ = 0;
    int component_count_ = 0;
};

std::int64_t euler_characteristic(const TriangleMesh& mesh);

/// Genus of a closed connected orientable mesh, (2 - chi) / 2.
/// Throws StructuralError on a disconnected mesh or odd chi.
int genus(const TriangleMesh& mesh);

TopologySummary topology_summary(const TriangleMesh& mesh);

/// (beta0, beta1, beta2) = (1, 2g, 1) for the connected closed orientable surface.
struct SurfaceBetti {
    std::int64_t beta0, beta1, beta2, chi;
};
SurfaceBetti surface_betti_numbers(const TriangleMesh& mesh);

double surface_area(const TriangleMesh& mesh);

/// Scale (per axis, about the origin), then rotate (Rz*Ry*Rx), then translate.
/// Connectivity is untouched. Throws std::invalid_argument on nonpositive scale.
TriangleMesh transform(const TriangleMesh& mesh, const Vec3& rotation_angles,
                       const Vec3& scale, const Vec3& translation);

/// Area-weighted unit vertex normals.
std::vector<Vec3> vertex_normals(const TriangleMesh& mesh);

double mean_edge_length(const TriangleMesh& mesh);

struct SeedParams {
    double cell_size = 1.0;
    int hole_cells = 2;       ///< side of each square through-hole, in cells
    int wall_cells = 1;       ///< material between holes and around the rim, in cells
    int thickness_cells = 2;  ///< plate thickness, in cells
    int subdivision = 2;      ///< quads per cell edge on the emitted surface
    int max_genus = 20;
};

/// Plate with g square through-holes arranged in a near-square grid,
/// thickened and triangulated. Genus is g by construction and asserted via chi.
TriangleMesh make_genus_g_seed(int g, const SeedParams& params = {});

}  // namespace topogrow
