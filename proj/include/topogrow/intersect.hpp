#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "topogrow/mesh.hpp"
#include "topogrow/vec3.hpp"

namespace topogrow {

/// Proper intersection of two triangles. Touching within 1e-12 of the
/// triangles' coordinate scale does not count.
bool triangles_intersect(const std::array<Vec3, 3>& a, const std::array<Vec3, 3>& b);

/// Triangle vs axis-aligned box overlap (separating axis test, inclusive).
bool triangle_box_overlap(const std::array<Vec3, 3>& tri, const Vec3& box_min,
                          const Vec3& box_max);

/// Static bounding-volume hierarchy over a mesh's triangles.
class AabbTree {
public:
    explicit AabbTree(const TriangleMesh& mesh);

    /// Indices of triangles whose boxes overlap [lo, hi].
    std::vector<std::int32_t> query_box(const Vec3& lo, const Vec3& hi) const;

    /// True iff any two non-adjacent triangles properly intersect.
    bool any_self_intersection() const;

    /// First intersecting pair found, or (-1, -1).
    std::pair<std::int32_t, std::int32_t> find_self_intersection() const;

    /// Up to `limit` intersecting non-adjacent triangle pairs.
    std::vector<std::pair<std::int32_t, std::int32_t>> all_self_intersections(
        std::size_t limit = 64) const;

private:
    struct Node {
        Vec3 lo, hi;
        std::int32_t left = -1, right = -1;  // internal children
        std::int32_t begin = 0, end = 0;     // leaf triangle range
        bool leaf() const { return left < 0; }
    };

    bool pair_recurse(std::int32_t a, std::int32_t b) const;
    bool leaf_pair(const Node& a, const Node& b) const;
    bool tris_adjacent(std::int32_t f, std::int32_t g) const;
    bool test_pair(std::int32_t f, std::int32_t g) const;

    const TriangleMesh* mesh_;
    std::vector<Node> nodes_;
    std::vector<std::int32_t> order_;  // triangle indices, leaf-contiguous
    std::vector<Vec3> tri_lo_, tri_hi_;
};

/// True iff any two non-adjacent (no shared vertex) triangles intersect.
bool has_self_intersection(const TriangleMesh& mesh);

/// Closest point on a triangle (Ericson).
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Distance from a point to a triangle.
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Ray-parity containment test with deterministic jitter retries on grazing hits.
bool point_inside_mesh(const TriangleMesh& mesh, const Vec3& point);

}  // namespace topogrow
