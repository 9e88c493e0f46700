#pragma once

// Shared fixtures and independent oracles. Oracles deliberately avoid the
// library code paths they check.

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <vector>

#include "topogrow/envgen.hpp"
#include "topogrow/growth.hpp"
#include "topogrow/mesh.hpp"
#include "topogrow/rasterize.hpp"
#include "topogrow/rng.hpp"
#include "topogrow/topology.hpp"

namespace topogrow::testutil {

inline TriangleMesh tetrahedron(double s = 1.0) {
    std::vector<Vec3> v{{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
    std::vector<TriangleMesh::Face> f{{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
    return TriangleMesh::create(std::move(v), std::move(f));
}

inline TriangleMesh cuboid_shell(const Vec3& lo, const Vec3& hi) {
    std::vector<Vec3> v;
    for (int c = 0; c < 8; ++c)
        v.push_back({(c & 1) ? hi.x : lo.x, (c & 2) ? hi.y : lo.y, (c & 4) ? hi.z : lo.z});
    static const int quads[6][4] = {
        {0, 4, 6, 2}, {1, 3, 7, 5}, {0, 1, 5, 4}, {2, 6, 7, 3}, {0, 2, 3, 1}, {4, 5, 7, 6},
    };
    std::vector<TriangleMesh::Face> f;
    for (const auto& q : quads) {
        f.push_back({q[0], q[1], q[2]});
        f.push_back({q[0], q[2], q[3]});
    }
    return TriangleMesh::create(std::move(v), std::move(f));
}

inline TriangleMesh torus_grid(int nu = 16, int nv = 8, double R = 2.0, double r = 0.7) {
    std::vector<Vec3> v;
    for (int i = 0; i < nu; ++i) {
        const double theta = 2.0 * M_PI * i / nu;
        for (int j = 0; j < nv; ++j) {
            const double phi = 2.0 * M_PI * j / nv;
            v.push_back({(R + r * std::cos(phi)) * std::cos(theta),
                         (R + r * std::cos(phi)) * std::sin(theta), r * std::sin(phi)});
        }
    }
    std::vector<TriangleMesh::Face> f;
    auto id = [&](int i, int j) { return ((i % nu + nu) % nu) * nv + ((j % nv + nv) % nv); };
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j) {
            f.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            f.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return TriangleMesh::create(std::move(v), std::move(f));
}

inline TriangleMesh bipyramid(int n = 15, double radius = 1.0, double height = 1.0) {
    std::vector<Vec3> v{{0, 0, height}, {0, 0, -height}};
    for (int i = 0; i < n; ++i) {
        const double a = 2.0 * M_PI * i / n;
        v.push_back({radius * std::cos(a), radius * std::sin(a), 0.0});
    }
    std::vector<TriangleMesh::Face> f;
    for (int i = 0; i < n; ++i) {
        const int a = 2 + i, b = 2 + (i + 1) % n;
        f.push_back({0, a, b});
        f.push_back({1, b, a});
    }
    return TriangleMesh::create(std::move(v), std::move(f));
}

inline TriangleMesh octahedron(double r = 1.0) {
    std::vector<Vec3> v{{r, 0, 0}, {-r, 0, 0}, {0, r, 0}, {0, -r, 0}, {0, 0, r}, {0, 0, -r}};
    std::vector<TriangleMesh::Face> f{{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
                                      {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
    return TriangleMesh::create(std::move(v), std::move(f));
}

inline TriangleMesh jittered(const TriangleMesh& mesh, double amplitude, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Vec3> v = mesh.vertices();
    for (Vec3& p : v)
        p += {rng.uniform(-amplitude, amplitude), rng.uniform(-amplitude, amplitude),
              rng.uniform(-amplitude, amplitude)};
    return TriangleMesh::create(std::move(v), std::vector<TriangleMesh::Face>(mesh.faces()));
}

/// Long-double area resummation over a shuffled face order.
inline long double independent_area(const TriangleMesh& mesh, std::uint64_t shuffle_seed) {
    std::vector<std::size_t> order(mesh.faces().size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(shuffle_seed);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.next_below(i)]);
    long double total = 0.0L;
    const auto& v = mesh.vertices();
    for (std::size_t i : order) {
        const auto& f = mesh.faces()[i];
        const Vec3 a = v[f[1]] - v[f[0]], b = v[f[2]] - v[f[0]];
        const Vec3 c = cross(a, b);
        total += 0.5L * std::sqrt(static_cast<long double>(norm2(c)));
    }
    return total;
}

/// O(F^2) pairwise self-intersection without the BVH.
inline bool exhaustive_self_intersection(const TriangleMesh& mesh);

/// Long-double tangent-point energy resummation over a shuffled pair order,
/// kernel recomputed inline.
inline long double independent_energy(const TriangleMesh& mesh, double alpha, double beta,
                                      std::uint64_t shuffle_seed) {
    const auto& v = mesh.vertices();
    const auto& faces = mesh.faces();
    struct Tri {
        long double cx, cy, cz, nx, ny, nz, area;
    };
    std::vector<Tri> tris(faces.size());
    for (std::size_t i = 0; i < faces.size(); ++i) {
        const auto& f = faces[i];
        Tri& t = tris[i];
        t.cx = (static_cast<long double>(v[f[0]].x) + v[f[1]].x + v[f[2]].x) / 3.0L;
        t.cy = (static_cast<long double>(v[f[0]].y) + v[f[1]].y + v[f[2]].y) / 3.0L;
        t.cz = (static_cast<long double>(v[f[0]].z) + v[f[1]].z + v[f[2]].z) / 3.0L;
        const long double e1x = v[f[1]].x - v[f[0]].x, e1y = v[f[1]].y - v[f[0]].y,
                          e1z = v[f[1]].z - v[f[0]].z;
        const long double e2x = v[f[2]].x - v[f[0]].x, e2y = v[f[2]].y - v[f[0]].y,
                          e2z = v[f[2]].z - v[f[0]].z;
        const long double nx = e1y * e2z - e1z * e2y;
        const long double ny = e1z * e2x - e1x * e2z;
        const long double nz = e1x * e2y - e1y * e2x;
        const long double len = std::sqrt(nx * nx + ny * ny + nz * nz);
        t.area = 0.5L * len;
        t.nx = nx / len;
        t.ny = ny / len;
        t.nz = nz / len;
    }
    auto adjacent = [&](std::size_t i, std::size_t j) {
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                if (faces[i][a] == faces[j][b]) return true;
        return false;
    };
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < faces.size(); ++i)
        for (std::size_t j = 0; j < faces.size(); ++j)
            if (i != j && !adjacent(i, j)) pairs.emplace_back(i, j);
    Rng rng(shuffle_seed);
    for (std::size_t i = pairs.size(); i > 1; --i)
        std::swap(pairs[i - 1], pairs[rng.next_below(i)]);

    long double total = 0.0L;
    for (const auto& [s, t] : pairs) {
        const long double dx = tris[t].cx - tris[s].cx;
        const long double dy = tris[t].cy - tris[s].cy;
        const long double dz = tris[t].cz - tris[s].cz;
        const long double r2 = dx * dx + dy * dy + dz * dz;
        const long double u = std::fabs(tris[s].nx * dx + tris[s].ny * dy + tris[s].nz * dz);
        total += std::pow(u, static_cast<long double>(alpha)) *
                 std::pow(r2, static_cast<long double>(-0.5 * beta)) * tris[s].area * tris[t].area;
    }
    return total;
}

/// Central finite differences of tangent_point_energy.
inline std::vector<Vec3> finite_difference_gradient(const TriangleMesh& mesh, double alpha,
                                                    double beta, double h) {
    std::vector<Vec3> grad(mesh.vertices().size());
    std::vector<Vec3> pos = mesh.vertices();
    for (std::size_t i = 0; i < pos.size(); ++i) {
        for (int k = 0; k < 3; ++k) {
            const double saved = pos[i][k];
            pos[i][k] = saved + h;
            const double ep = tangent_point_energy(mesh.with_positions(pos), alpha, beta);
            pos[i][k] = saved - h;
            const double em = tangent_point_energy(mesh.with_positions(pos), alpha, beta);
            pos[i][k] = saved;
            grad[i][k] = (ep - em) / (2.0 * h);
        }
    }
    return grad;
}

/// Independent box distance via the closest-point form.
inline double oracle_box_distance(const Box& box, const Vec3& p) {
    const Vec3 q{std::clamp(p.x, box.min.x, box.max.x), std::clamp(p.y, box.min.y, box.max.y),
                 std::clamp(p.z, box.min.z, box.max.z)};
    const double outside = norm(p - q);
    if (outside > 0.0) return outside;
    double inside = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k)
        inside = std::min(inside, std::min(p[k] - box.min[k], box.max[k] - p[k]));
    return -inside;
}

/// Brute-force cell enumeration through explicit coordinate sets.
inline CubicalComplexCounts enumerate_cells_bruteforce(const VoxelGrid& grid) {
    using Key = std::array<int, 4>;  // x, y, z, orientation
    std::set<Key> vertices, edges, squares;
    std::int64_t cubes = 0;
    const int r = grid.resolution;
    for (int z = 0; z < r; ++z)
        for (int y = 0; y < r; ++y)
            for (int x = 0; x < r; ++x) {
                if (!grid.at(x, y, z)) continue;
                ++cubes;
                for (int dz = 0; dz <= 1; ++dz)
                    for (int dy = 0; dy <= 1; ++dy)
                        for (int dx = 0; dx <= 1; ++dx)
                            vertices.insert({x + dx, y + dy, z + dz, 0});
                for (int axis = 0; axis < 3; ++axis)
                    for (int da = 0; da <= 1; ++da)
                        for (int db = 0; db <= 1; ++db) {
                            Key e{x, y, z, axis};
                            e[(axis + 1) % 3] += da;
                            e[(axis + 2) % 3] += db;
                            edges.insert(e);
                        }
                for (int normal = 0; normal < 3; ++normal)
                    for (int d = 0; d <= 1; ++d) {
                        Key s{x, y, z, normal};
                        s[normal] += d;
                        squares.insert(s);
                    }
            }
    return {static_cast<std::int64_t>(vertices.size()), static_cast<std::int64_t>(edges.size()),
            static_cast<std::int64_t>(squares.size()), cubes};
}

/// Foreground component count under 6- or 26-adjacency, independent of the
/// library's labeling code.
inline std::int64_t foreground_components(const VoxelGrid& grid, bool diagonal) {
    const int r = grid.resolution;
    std::vector<std::int8_t> seen(grid.occupancy.size(), 0);
    std::vector<std::array<int, 3>> stack;
    std::int64_t components = 0;
    for (int z = 0; z < r; ++z)
        for (int y = 0; y < r; ++y)
            for (int x = 0; x < r; ++x) {
                if (!grid.at(x, y, z) || seen[grid.index(x, y, z)]) continue;
                ++components;
                seen[grid.index(x, y, z)] = 1;
                stack.push_back({x, y, z});
                while (!stack.empty()) {
                    const auto [cx, cy, cz] = stack.back();
                    stack.pop_back();
                    for (int dz = -1; dz <= 1; ++dz)
                        for (int dy = -1; dy <= 1; ++dy)
                            for (int dx = -1; dx <= 1; ++dx) {
                                if (!dx && !dy && !dz) continue;
                                if (!diagonal && std::abs(dx) + std::abs(dy) + std::abs(dz) != 1)
                                    continue;
                                const int nx = cx + dx, ny = cy + dy, nz = cz + dz;
                                if (!grid.in_range(nx, ny, nz) || !grid.at(nx, ny, nz) ||
                                    seen[grid.index(nx, ny, nz)])
                                    continue;
                                seen[grid.index(nx, ny, nz)] = 1;
                                stack.push_back({nx, ny, nz});
                            }
                }
            }
    return components;
}

inline VoxelGrid make_grid(int res, const std::vector<std::array<int, 3>>& occupied) {
    VoxelGrid g = VoxelGrid::empty(res);
    for (const auto& [x, y, z] : occupied) g.set(x, y, z, true);
    return g;
}

inline VoxelGrid random_grid(int res, double p, std::uint64_t seed) {
    VoxelGrid g = VoxelGrid::empty(res);
    Rng rng(seed);
    for (auto& cell : g.occupancy) cell = rng.bernoulli(p) ? 1 : 0;
    return g;
}

}  // namespace topogrow::testutil

#include "topogrow/intersect.hpp"

namespace topogrow::testutil {

inline bool exhaustive_self_intersection(const TriangleMesh& mesh) {
    const auto& v = mesh.vertices();
    const auto& faces = mesh.faces();
    for (std::size_t i = 0; i < faces.size(); ++i) {
        for (std::size_t j = i + 1; j < faces.size(); ++j) {
            bool shared = false;
            for (int a = 0; a < 3 && !shared; ++a)
                for (int b = 0; b < 3 && !shared; ++b)
                    shared = faces[i][a] == faces[j][b];
            if (shared) continue;
            if (triangles_intersect(
                    {v[faces[i][0]], v[faces[i][1]], v[faces[i][2]]},
                    {v[faces[j][0]], v[faces[j][1]], v[faces[j][2]]}))
                return true;
        }
    }
    return false;
}

}  // namespace topogrow::testutil
