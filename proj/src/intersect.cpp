#include "topogrow/intersect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace topogrow {

namespace {

constexpr double kRelEps = 1e-12;

double coord_scale(const std::array<Vec3, 3>& a, const std::array<Vec3, 3>& b) {
    double s = 0.0;
    for (const Vec3& v : a) s = std::max(s, max_abs_component(v));
    for (const Vec3& v : b) s = std::max(s, max_abs_component(v));
    return std::max(s, 1e-30);
}

struct Interval {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    int points = 0;
    void add(double t) {
        lo = std::min(lo, t);
        hi = std::max(hi, t);
        ++points;
    }
};

/// Chord of `tri` on the plane-intersection line, projected onto direction d.
/// dist[i] are signed distances to the other triangle's plane; tol separates
/// "on plane" from a proper crossing.
Interval chord_interval(const std::array<Vec3, 3>& tri, const std::array<double, 3>& dist,
                        const Vec3& d, double tol) {
    Interval iv;
    std::array<double, 3> proj{dot(d, tri[0]), dot(d, tri[1]), dot(d, tri[2])};
    for (int i = 0; i < 3; ++i) {
        if (std::abs(dist[i]) <= tol) iv.add(proj[i]);
        const int j = (i + 1) % 3;
        if ((dist[i] > tol && dist[j] < -tol) || (dist[i] < -tol && dist[j] > tol)) {
            const double t = dist[i] / (dist[i] - dist[j]);
            iv.add(proj[i] + t * (proj[j] - proj[i]));
        }
    }
    return iv;
}

int dominant_axis(const Vec3& n) {
    const double ax = std::abs(n.x), ay = std::abs(n.y), az = std::abs(n.z);
    if (ax >= ay && ax >= az) return 0;
    return ay >= az ? 1 : 2;
}

struct P2 {
    double u, v;
};

double orient2d(const P2& a, const P2& b, const P2& c) {
    return (b.u - a.u) * (c.v - a.v) - (b.v - a.v) * (c.u - a.u);
}

bool segments_cross(const P2& a, const P2& b, const P2& c, const P2& d, double tol) {
    const double o1 = orient2d(a, b, c), o2 = orient2d(a, b, d);
    const double o3 = orient2d(c, d, a), o4 = orient2d(c, d, b);
    return ((o1 > tol && o2 < -tol) || (o1 < -tol && o2 > tol)) &&
           ((o3 > tol && o4 < -tol) || (o3 < -tol && o4 > tol));
}

bool point_in_tri_2d(const P2& p, const P2& a, const P2& b, const P2& c, double tol) {
    const double o1 = orient2d(a, b, p), o2 = orient2d(b, c, p), o3 = orient2d(c, a, p);
    return (o1 > tol && o2 > tol && o3 > tol) || (o1 < -tol && o2 < -tol && o3 < -tol);
}

bool coplanar_overlap(const std::array<Vec3, 3>& a, const std::array<Vec3, 3>& b,
                      const Vec3& normal, double scale) {
    const int axis = dominant_axis(normal);
    const int u = (axis + 1) % 3, v = (axis + 2) % 3;
    std::array<P2, 3> pa, pb;
    for (int i = 0; i < 3; ++i) {
        pa[i] = {a[i][u], a[i][v]};
        pb[i] = {b[i][u], b[i][v]};
    }
    const double tol = kRelEps * scale * scale;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (segments_cross(pa[i], pa[(i + 1) % 3], pb[j], pb[(j + 1) % 3], tol)) return true;
    for (int i = 0; i < 3; ++i) {
        if (point_in_tri_2d(pa[i], pb[0], pb[1], pb[2], tol)) return true;
        if (point_in_tri_2d(pb[i], pa[0], pa[1], pa[2], tol)) return true;
    }
    return false;
}

}  // namespace

bool triangles_intersect(const std::array<Vec3, 3>& a, const std::array<Vec3, 3>& b) {
    const double scale = coord_scale(a, b);

    const Vec3 na = cross(a[1] - a[0], a[2] - a[0]);
    const Vec3 nb = cross(b[1] - b[0], b[2] - b[0]);
    const double lna = norm(na), lnb = norm(nb);
    if (lna <= 0.0 || lnb <= 0.0) return false;  // degenerate input

    const double tol_b = kRelEps * scale * lnb;
    std::array<double, 3> da{dot(nb, a[0] - b[0]), dot(nb, a[1] - b[0]), dot(nb, a[2] - b[0])};
    if ((da[0] > tol_b && da[1] > tol_b && da[2] > tol_b) ||
        (da[0] < -tol_b && da[1] < -tol_b && da[2] < -tol_b))
        return false;

    const double tol_a = kRelEps * scale * lna;
    std::array<double, 3> db{dot(na, b[0] - a[0]), dot(na, b[1] - a[0]), dot(na, b[2] - a[0])};
    if ((db[0] > tol_a && db[1] > tol_a && db[2] > tol_a) ||
        (db[0] < -tol_a && db[1] < -tol_a && db[2] < -tol_a))
        return false;

    const bool a_on = std::abs(da[0]) <= tol_b && std::abs(da[1]) <= tol_b && std::abs(da[2]) <= tol_b;
    const bool b_on = std::abs(db[0]) <= tol_a && std::abs(db[1]) <= tol_a && std::abs(db[2]) <= tol_a;
    if (a_on || b_on) return coplanar_overlap(a, b, na, scale);

    const Vec3 d = cross(na, nb);
    const Interval ia = chord_interval(a, da, d, tol_b);
    const Interval ib = chord_interval(b, db, d, tol_a);
    if (ia.points < 2 || ib.points < 2) return false;  // touch, not a crossing

    const double line_tol = kRelEps * scale * norm(d);
    return std::min(ia.hi, ib.hi) - std::max(ia.lo, ib.lo) > line_tol;
}

bool triangle_box_overlap(const std::array<Vec3, 3>& tri, const Vec3& box_min,
                          const Vec3& box_max) {
    const Vec3 c = 0.5 * (box_min + box_max);
    const Vec3 h = 0.5 * (box_max - box_min);
    const Vec3 v0 = tri[0] - c, v1 = tri[1] - c, v2 = tri[2] - c;
    const Vec3 e0 = v1 - v0, e1 = v2 - v1, e2 = v0 - v2;

    auto axis_test = [&](const Vec3& axis) {
        const double p0 = dot(v0, axis), p1 = dot(v1, axis), p2 = dot(v2, axis);
        const double r = h.x * std::abs(axis.x) + h.y * std::abs(axis.y) + h.z * std::abs(axis.z);
        return std::min({p0, p1, p2}) > r || std::max({p0, p1, p2}) < -r;
    };

    // 9 cross-product axes
    const std::array<Vec3, 3> edges{e0, e1, e2};
    const std::array<Vec3, 3> units{Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
    for (const Vec3& e : edges)
        for (const Vec3& u : units)
            if (axis_test(cross(u, e))) return false;

    // box face normals
    for (int k = 0; k < 3; ++k) {
        const double lo = std::min({v0[k], v1[k], v2[k]});
        const double hi = std::max({v0[k], v1[k], v2[k]});
        if (lo > h[k] || hi < -h[k]) return false;
    }

    // triangle plane
    return !axis_test(cross(e0, e1));
}

AabbTree::AabbTree(const TriangleMesh& mesh) : mesh_(&mesh) {
    const auto& v = mesh.vertices();
    const auto n = static_cast<std::int32_t>(mesh.faces().size());
    tri_lo_.resize(n);
    tri_hi_.resize(n);
    std::vector<Vec3> centroids(n);
    for (std::int32_t i = 0; i < n; ++i) {
        const auto& f = mesh.faces()[i];
        tri_lo_[i] = cwise_min(v[f[0]], cwise_min(v[f[1]], v[f[2]]));
        tri_hi_[i] = cwise_max(v[f[0]], cwise_max(v[f[1]], v[f[2]]));
        centroids[i] = (v[f[0]] + v[f[1]] + v[f[2]]) / 3.0;
    }
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0);

    struct Item {
        std::int32_t begin, end, parent;
        bool second;
    };
    std::vector<Item> stack{{0, n, -1, false}};
    nodes_.reserve(2 * n);
    while (!stack.empty()) {
        const Item item = stack.back();
        stack.pop_back();
        const std::int32_t id = static_cast<std::int32_t>(nodes_.size());
        nodes_.emplace_back();
        if (item.parent >= 0) {
            (item.second ? nodes_[item.parent].right : nodes_[item.parent].left) = id;
        }
        Node& node = nodes_.back();
        node.lo = tri_lo_[order_[item.begin]];
        node.hi = tri_hi_[order_[item.begin]];
        for (std::int32_t i = item.begin + 1; i < item.end; ++i) {
            node.lo = cwise_min(node.lo, tri_lo_[order_[i]]);
            node.hi = cwise_max(node.hi, tri_hi_[order_[i]]);
        }
        const std::int32_t count = item.end - item.begin;
        if (count <= 4) {
            node.begin = item.begin;
            node.end = item.end;
            continue;
        }
        const Vec3 extent = node.hi - node.lo;
        int axis = 0;
        if (extent.y > extent[axis]) axis = 1;
        if (extent.z > extent[axis]) axis = 2;
        const std::int32_t mid = item.begin + count / 2;
        std::nth_element(order_.begin() + item.begin, order_.begin() + mid,
                         order_.begin() + item.end, [&](std::int32_t a, std::int32_t b) {
                             return centroids[a][axis] < centroids[b][axis];
                         });
        node.left = -2;  // placeholder, filled when children pop
        stack.push_back({item.begin, mid, id, false});
        stack.push_back({mid, item.end, id, true});
    }
}

std::vector<std::int32_t> AabbTree::query_box(const Vec3& lo, const Vec3& hi) const {
    std::vector<std::int32_t> out;
    std::vector<std::int32_t> stack{0};
    while (!stack.empty()) {
        const Node& node = nodes_[stack.back()];
        stack.pop_back();
        if (node.lo.x > hi.x || node.hi.x < lo.x || node.lo.y > hi.y || node.hi.y < lo.y ||
            node.lo.z > hi.z || node.hi.z < lo.z)
            continue;
        if (node.leaf()) {
            for (std::int32_t i = node.begin; i < node.end; ++i) {
                const std::int32_t t = order_[i];
                if (tri_lo_[t].x <= hi.x && tri_hi_[t].x >= lo.x && tri_lo_[t].y <= hi.y &&
                    tri_hi_[t].y >= lo.y && tri_lo_[t].z <= hi.z && tri_hi_[t].z >= lo.z)
                    out.push_back(t);
            }
        } else {
            stack.push_back(node.left);
            stack.push_back(node.right);
        }
    }
    return out;
}

bool AabbTree::tris_adjacent(std::int32_t f, std::int32_t g) const {
    const auto& a = mesh_->faces()[f];
    const auto& b = mesh_->faces()[g];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (a[i] == b[j]) return true;
    return false;
}

bool AabbTree::test_pair(std::int32_t f, std::int32_t g) const {
    if (f == g || tris_adjacent(f, g)) return false;
    const auto& v = mesh_->vertices();
    const auto& fa = mesh_->faces()[f];
    const auto& fb = mesh_->faces()[g];
    return triangles_intersect({v[fa[0]], v[fa[1]], v[fa[2]]}, {v[fb[0]], v[fb[1]], v[fb[2]]});
}

bool AabbTree::leaf_pair(const Node& a, const Node& b) const {
    for (std::int32_t i = a.begin; i < a.end; ++i) {
        const std::int32_t jb = (&a == &b) ? i + 1 : b.begin;
        for (std::int32_t j = jb; j < b.end; ++j) {
            if (test_pair(order_[i], order_[j])) return true;
        }
    }
    return false;
}

bool AabbTree::pair_recurse(std::int32_t ai, std::int32_t bi) const {
    const Node& a = nodes_[ai];
    const Node& b = nodes_[bi];
    if (a.lo.x > b.hi.x || a.hi.x < b.lo.x || a.lo.y > b.hi.y || a.hi.y < b.lo.y ||
        a.lo.z > b.hi.z || a.hi.z < b.lo.z)
        return false;
    if (a.leaf() && b.leaf()) return leaf_pair(a, b);
    if (a.leaf()) return pair_recurse(ai, b.left) || pair_recurse(ai, b.right);
    if (b.leaf()) return pair_recurse(a.left, bi) || pair_recurse(a.right, bi);
    if (ai == bi)
        return pair_recurse(a.left, a.left) || pair_recurse(a.left, a.right) ||
               pair_recurse(a.right, a.right);
    return pair_recurse(a.left, b.left) || pair_recurse(a.left, b.right) ||
           pair_recurse(a.right, b.left) || pair_recurse(a.right, b.right);
}

bool AabbTree::any_self_intersection() const { return pair_recurse(0, 0); }

std::pair<std::int32_t, std::int32_t> AabbTree::find_self_intersection() const {
    const auto pairs = all_self_intersections(1);
    return pairs.empty() ? std::pair<std::int32_t, std::int32_t>{-1, -1} : pairs.front();
}

std::vector<std::pair<std::int32_t, std::int32_t>> AabbTree::all_self_intersections(
    std::size_t limit) const {
    std::vector<std::pair<std::int32_t, std::int32_t>> out;
    std::vector<std::pair<std::int32_t, std::int32_t>> stack{{0, 0}};
    while (!stack.empty() && out.size() < limit) {
        const auto [ai, bi] = stack.back();
        stack.pop_back();
        const Node& a = nodes_[ai];
        const Node& b = nodes_[bi];
        if (a.lo.x > b.hi.x || a.hi.x < b.lo.x || a.lo.y > b.hi.y || a.hi.y < b.lo.y ||
            a.lo.z > b.hi.z || a.hi.z < b.lo.z)
            continue;
        if (a.leaf() && b.leaf()) {
            for (std::int32_t i = a.begin; i < a.end; ++i) {
                const std::int32_t jb = (ai == bi) ? i + 1 : b.begin;
                for (std::int32_t j = jb; j < b.end; ++j)
                    if (test_pair(order_[i], order_[j])) out.push_back({order_[i], order_[j]});
            }
        } else if (a.leaf()) {
            stack.push_back({ai, b.left});
            stack.push_back({ai, b.right});
        } else if (b.leaf() || ai != bi) {
            if (b.leaf()) {
                stack.push_back({a.left, bi});
                stack.push_back({a.right, bi});
            } else {
                stack.push_back({a.left, b.left});
                stack.push_back({a.left, b.right});
                stack.push_back({a.right, b.left});
                stack.push_back({a.right, b.right});
            }
        } else {
            stack.push_back({a.left, a.left});
            stack.push_back({a.left, a.right});
            stack.push_back({a.right, a.right});
        }
    }
    return out;
}

bool has_self_intersection(const TriangleMesh& mesh) {
    if (mesh.faces().size() < 2) return false;
    return AabbTree(mesh).any_self_intersection();
}

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = dot(ab, ap), d2 = dot(ac, ap);
    if (d1 <= 0.0 && d2 <= 0.0) return a;

    const Vec3 bp = p - b;
    const double d3 = dot(ab, bp), d4 = dot(ac, bp);
    if (d3 >= 0.0 && d4 <= d3) return b;

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;

    const Vec3 cp = p - c;
    const double d5 = dot(ab, cp), d6 = dot(ac, cp);
    if (d6 >= 0.0 && d5 <= d6) return c;

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && d4 - d3 >= 0.0 && d5 - d6 >= 0.0)
        return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);

    const double denom = 1.0 / (va + vb + vc);
    return a + (vb * denom) * ab + (vc * denom) * ac;
}

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    return norm(p - closest_point_on_triangle(p, a, b, c));
}

bool point_inside_mesh(const TriangleMesh& mesh, const Vec3& point) {
    const auto& v = mesh.vertices();
    const double scale = std::max(max_abs_component(mesh.bbox_max() - mesh.bbox_min()), 1e-30);
    const double eps = 1e-9;

    // Deterministic direction sequence: +x, then slight tilts.
    for (int attempt = 0; attempt < 16; ++attempt) {
        const Vec3 dir = normalized(Vec3{1.0, attempt * 1e-4 * 0.7548776662,
                                         attempt * 1e-4 * 0.5698402910});
        int crossings = 0;
        bool grazing = false;
        for (const auto& f : mesh.faces()) {
            const Vec3& a = v[f[0]];
            const Vec3 e1 = v[f[1]] - a, e2 = v[f[2]] - a;
            const Vec3 p = cross(dir, e2);
            const double det = dot(e1, p);
            if (std::abs(det) < eps * scale * scale) {
                // Parallel ray: only a problem if it could pass through the plane region.
                continue;
            }
            const double inv = 1.0 / det;
            const Vec3 s = point - a;
            const double u = dot(s, p) * inv;
            const Vec3 q = cross(s, e1);
            const double w = dot(dir, q) * inv;
            const double t = dot(e2, q) * inv;
            if (u < -eps || w < -eps || u + w > 1.0 + eps || t < -eps) continue;
            if (u < eps || w < eps || u + w > 1.0 - eps || t < eps) {
                grazing = true;
                break;
            }
            ++crossings;
        }
        if (!grazing) return (crossings % 2) == 1;
    }
    // Every jitter grazed; fall back to the last parity guess.
    return false;
}

}  // namespace topogrow
