#include "topogrow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "topogrow/errors.hpp"

namespace topogrow {

namespace {

std::uint64_t directed_edge_key(std::int32_t a, std::int32_t b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
}

double face_area(const std::vector<Vec3>& v, const TriangleMesh::Face& f) {
    return 0.5 * norm(cross(v[f[1]] - v[f[0]], v[f[2]] - v[f[0]]));
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

TriangleMesh TriangleMesh::create(std::vector<Vec3> vertices, std::vector<Face> faces) {
    const auto n_vertices = static_cast<std::int64_t>(vertices.size());
    if (faces.empty()) throw StructuralError("mesh has no faces");

    std::vector<bool> referenced(vertices.size(), false);
    for (std::size_t fi = 0; fi < faces.size(); ++fi) {
        const Face& f = faces[fi];
        for (int k = 0; k < 3; ++k) {
            if (f[k] < 0 || f[k] >= n_vertices)
                throw StructuralError("face " + std::to_string(fi) + " references vertex " +
                                      std::to_string(f[k]) + " out of range");
            referenced[f[k]] = true;
        }
        if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2])
            throw StructuralError("face " + std::to_string(fi) + " repeats a vertex");
        if (face_area(vertices, f) <= 0.0)
            throw StructuralError("face " + std::to_string(fi) + " is degenerate (zero area)");
    }
    for (std::size_t vi = 0; vi < vertices.size(); ++vi)
        if (!referenced[vi])
            throw StructuralError("vertex " + std::to_string(vi) + " is not referenced by any face");

    // A closed 2-manifold with consistent winding has every directed edge
    // exactly once, matched by its reverse.
    std::unordered_map<std::uint64_t, std::int32_t> directed;
    directed.reserve(faces.size() * 3);
    for (std::size_t fi = 0; fi < faces.size(); ++fi) {
        const Face& f = faces[fi];
        for (int k = 0; k < 3; ++k) {
            const std::int32_t a = f[k], b = f[(k + 1) % 3];
            auto [it, inserted] = directed.try_emplace(directed_edge_key(a, b),
                                                       static_cast<std::int32_t>(fi));
            if (!inserted)
                throw StructuralError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                                      ") traversed twice in the same direction: non-manifold "
                                      "or inconsistently wound");
        }
    }
    std::int64_t edge_count = 0;
    for (const auto& [key, fi] : directed) {
        const auto a = static_cast<std::int32_t>(key >> 32);
        const auto b = static_cast<std::int32_t>(key & 0xFFFFFFFFu);
        if (!directed.count(directed_edge_key(b, a)))
            throw StructuralError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                                  ") has no opposite half-edge: mesh is not closed");
        if (a < b) ++edge_count;
    }

    UnionFind uf(static_cast<int>(vertices.size()));
    for (const Face& f : faces) {
        uf.unite(f[0], f[1]);
        uf.unite(f[0], f[2]);
    }
    std::unordered_set<int> roots;
    for (std::size_t vi = 0; vi < vertices.size(); ++vi) roots.insert(uf.find(static_cast<int>(vi)));

    TriangleMesh mesh;
    mesh.vertices_ = std::move(vertices);
    mesh.faces_ = std::move(faces);
    mesh.edge_count_ = edge_count;
    mesh.component_count_ = static_cast<int>(roots.size());
    return mesh;
}

TriangleMesh TriangleMesh::with_positions(std::vector<Vec3> positions) const {
    if (positions.size() != vertices_.size())
        throw std::invalid_argument("position count does not match vertex count");
    TriangleMesh mesh;
    mesh.vertices_ = std::move(positions);
    mesh.faces_ = faces_;
    mesh.edge_count_ = edge_count_;
    mesh.component_count_ = component_count_;
    return mesh;
}

Vec3 TriangleMesh::bbox_min() const {
    Vec3 lo = vertices_.front();
    for (const Vec3& v : vertices_) lo = cwise_min(lo, v);
    return lo;
}

Vec3 TriangleMesh::bbox_max() const {
    Vec3 hi = vertices_.front();
    for (const Vec3& v : vertices_) hi = cwise_max(hi, v);
    return hi;
}

std::int64_t euler_characteristic(const TriangleMesh& mesh) {
    return mesh.vertex_count() - mesh.edge_count() + mesh.face_count();
}

int genus(const TriangleMesh& mesh) {
    if (mesh.component_count() != 1)
        throw StructuralError("genus requires a connected mesh, got " +
                              std::to_string(mesh.component_count()) + " components");
    const std::int64_t chi = euler_characteristic(mesh);
    if (chi % 2 != 0)
        throw StructuralError("odd Euler characteristic " + std::to_string(chi));
    return static_cast<int>((2 - chi) / 2);
}

TopologySummary topology_summary(const TriangleMesh& mesh) {
    TopologySummary s;
    s.vertex_count = mesh.vertex_count();
    s.edge_count = mesh.edge_count();
    s.face_count = mesh.face_count();
    s.euler_characteristic = euler_characteristic(mesh);
    s.component_count = mesh.component_count();
    s.genus = (s.component_count == 1 && s.euler_characteristic % 2 == 0)
                  ? static_cast<int>((2 - s.euler_characteristic) / 2)
                  : -1;
    return s;
}

SurfaceBetti surface_betti_numbers(const TriangleMesh& mesh) {
    const int g = genus(mesh);
    return SurfaceBetti{1, 2 * static_cast<std::int64_t>(g), 1, 2 - 2 * static_cast<std::int64_t>(g)};
}

double surface_area(const TriangleMesh& mesh) {
    // Compensated summation keeps the total independent of face count.
    double sum = 0.0, c = 0.0;
    const auto& v = mesh.vertices();
    for (const auto& f : mesh.faces()) {
        const double a = face_area(v, f);
        const double y = a - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    return sum;
}

TriangleMesh transform(const TriangleMesh& mesh, const Vec3& rotation_angles,
                       const Vec3& scale, const Vec3& translation) {
    if (scale.x <= 0.0 || scale.y <= 0.0 || scale.z <= 0.0)
        throw std::invalid_argument("scale factors must be positive");
    const Mat3 rot = euler_rotation(rotation_angles);
    std::vector<Vec3> out;
    out.reserve(mesh.vertices().size());
    for (const Vec3& p : mesh.vertices()) {
        const Vec3 s{p.x * scale.x, p.y * scale.y, p.z * scale.z};
        out.push_back(rot.apply(s) + translation);
    }
    return mesh.with_positions(std::move(out));
}

std::vector<Vec3> vertex_normals(const TriangleMesh& mesh) {
    std::vector<Vec3> normals(mesh.vertices().size());
    const auto& v = mesh.vertices();
    for (const auto& f : mesh.faces()) {
        const Vec3 n = cross(v[f[1]] - v[f[0]], v[f[2]] - v[f[0]]);  // 2*area weighted
        for (int k = 0; k < 3; ++k) normals[f[k]] += n;
    }
    for (Vec3& n : normals) n = normalized(n);
    return normals;
}

double mean_edge_length(const TriangleMesh& mesh) {
    const auto& v = mesh.vertices();
    double total = 0.0;
    std::int64_t count = 0;
    for (const auto& f : mesh.faces()) {
        for (int k = 0; k < 3; ++k) {
            const std::int32_t a = f[k], b = f[(k + 1) % 3];
            if (a < b) {  // each undirected edge once
                total += norm(v[a] - v[b]);
                ++count;
            }
        }
    }
    return count > 0 ? total / static_cast<double>(count) : 0.0;
}

namespace {

/// Column-extruded cell solid: footprint(x, y) says whether the column of
/// `thickness` cells at (x, y) is material. Emits the boundary surface with
/// outward orientation, `sub` quads per cell edge edge, welded vertices.
class SurfaceBuilder {
public:
    SurfaceBuilder(int nx, int ny, int nz, int sub, double cell_size)
        : nx_(nx), ny_(ny), nz_(nz), sub_(sub), cell_(cell_size) {}

    void set_solid(std::vector<bool> solid) { solid_ = std::move(solid); }

    bool solid_at(int x, int y, int z) const {
        if (x < 0 || y < 0 || z < 0 || x >= nx_ || y >= ny_ || z >= nz_) return false;
        return solid_[(static_cast<std::size_t>(z) * ny_ + y) * nx_ + x];
    }

    TriangleMesh build() {
        for (int z = 0; z < nz_; ++z)
            for (int y = 0; y < ny_; ++y)
                for (int x = 0; x < nx_; ++x) {
                    if (!solid_at(x, y, z)) continue;
                    // -x / +x / -y / +y / -z / +z neighbors
                    if (!solid_at(x - 1, y, z)) emit_face(x, y, z, 0, false);
                    if (!solid_at(x + 1, y, z)) emit_face(x, y, z, 0, true);
                    if (!solid_at(x, y - 1, z)) emit_face(x, y, z, 1, false);
                    if (!solid_at(x, y + 1, z)) emit_face(x, y, z, 1, true);
                    if (!solid_at(x, y, z - 1)) emit_face(x, y, z, 2, false);
                    if (!solid_at(x, y, z + 1)) emit_face(x, y, z, 2, true);
                }
        // Center the mesh on the origin.
        const Vec3 center{0.5 * nx_ * cell_, 0.5 * ny_ * cell_, 0.5 * nz_ * cell_};
        for (Vec3& v : vertices_) v -= center;
        return TriangleMesh::create(std::move(vertices_), std::move(faces_));
    }

private:
    int vertex_id(std::int64_t i, std::int64_t j, std::int64_t k) {
        const std::uint64_t key = (static_cast<std::uint64_t>(i) << 42) |
                                  (static_cast<std::uint64_t>(j) << 21) |
                                  static_cast<std::uint64_t>(k);
        auto [it, inserted] = vertex_ids_.try_emplace(key, static_cast<std::int32_t>(vertices_.size()));
        if (inserted) {
            const double s = cell_ / sub_;
            vertices_.push_back({i * s, j * s, k * s});
        }
        return it->second;
    }

    /// Boundary face of the unit cell (x,y,z) with normal along +/- `axis`,
    /// subdivided sub x sub, wound outward.
    void emit_face(int x, int y, int z, int axis, bool positive) {
        const int u_axis = (axis + 1) % 3, v_axis = (axis + 2) % 3;
        std::array<std::int64_t, 3> base{static_cast<std::int64_t>(x) * sub_,
                                         static_cast<std::int64_t>(y) * sub_,
                                         static_cast<std::int64_t>(z) * sub_};
        if (positive) base[axis] += sub_;
        for (int a = 0; a < sub_; ++a) {
            for (int b = 0; b < sub_; ++b) {
                std::array<std::int64_t, 3> p = base;
                p[u_axis] += a;
                p[v_axis] += b;
                auto corner = [&](int da, int db) {
                    std::array<std::int64_t, 3> q = p;
                    q[u_axis] += da;
                    q[v_axis] += db;
                    return vertex_id(q[0], q[1], q[2]);
                };
                const int v00 = corner(0, 0), v10 = corner(1, 0);
                const int v11 = corner(1, 1), v01 = corner(0, 1);
                if (positive) {  // outward = +axis; (u x v) points along +axis
                    faces_.push_back({v00, v10, v11});
                    faces_.push_back({v00, v11, v01});
                } else {
                    faces_.push_back({v00, v11, v10});
                    faces_.push_back({v00, v01, v11});
                }
            }
        }
    }

    int nx_, ny_, nz_, sub_;
    double cell_;
    std::vector<bool> solid_;
    std::unordered_map<std::uint64_t, std::int32_t> vertex_ids_;
    std::vector<Vec3> vertices_;
    std::vector<TriangleMesh::Face> faces_;
};

}  // namespace

TriangleMesh make_genus_g_seed(int g, const SeedParams& params) {
    if (g < 0) throw std::invalid_argument("genus must be nonnegative");
    if (g > params.max_genus)
        throw std::invalid_argument("genus " + std::to_string(g) + " exceeds ceiling " +
                                    std::to_string(params.max_genus));
    if (params.hole_cells < 1 || params.wall_cells < 1 || params.thickness_cells < 1 ||
        params.subdivision < 1 || params.cell_size <= 0.0)
        throw std::invalid_argument("invalid seed geometry parameters");

    int rows, cols;
    if (g == 0) {
        rows = cols = 0;
    } else {
        rows = static_cast<int>(std::floor(std::sqrt(static_cast<double>(g))));
        rows = std::max(rows, 1);
        cols = (g + rows - 1) / rows;
    }

    const int pitch = params.hole_cells + params.wall_cells;
    const int nx = (g == 0) ? 2 * pitch : cols * pitch + params.wall_cells;
    const int ny = (g == 0) ? pitch + params.wall_cells : rows * pitch + params.wall_cells;
    const int nz = params.thickness_cells;

    std::vector<bool> solid(static_cast<std::size_t>(nx) * ny * nz, true);
    auto carve_hole = [&](int cx, int cy) {
        for (int z = 0; z < nz; ++z)
            for (int dy = 0; dy < params.hole_cells; ++dy)
                for (int dx = 0; dx < params.hole_cells; ++dx) {
                    const int x = params.wall_cells + cx * pitch + dx;
                    const int y = params.wall_cells + cy * pitch + dy;
                    solid[(static_cast<std::size_t>(z) * ny + y) * nx + x] = false;
                }
    };
    int carved = 0;
    for (int cy = 0; cy < rows && carved < g; ++cy)
        for (int cx = 0; cx < cols && carved < g; ++cx) {
            carve_hole(cx, cy);
            ++carved;
        }

    SurfaceBuilder builder(nx, ny, nz, params.subdivision, params.cell_size);
    builder.set_solid(std::move(solid));
    TriangleMesh mesh = builder.build();

    const std::int64_t chi = euler_characteristic(mesh);
    if (chi != 2 - 2 * static_cast<std::int64_t>(g))
        throw StructuralError("seed construction produced chi=" + std::to_string(chi) +
                              ", expected " + std::to_string(2 - 2 * g));
    return mesh;
}

}  // namespace topogrow
