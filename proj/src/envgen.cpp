#include "topogrow/envgen.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "topogrow/errors.hpp"
#include "topogrow/rng.hpp"

namespace topogrow {

void RandomGridSpec::validate() const {
    if (cube_side <= 0.0 || chunks_per_axis <= 0 || subchunk_side <= 0.0)
        throw std::invalid_argument("environment dimensions must be positive");
    if (std::abs(chunks_per_axis * subchunk_side - cube_side) > 1e-9 * cube_side)
        throw std::invalid_argument("chunksPerAxis * subchunkSide must equal cubeSide");
    if (axis_resolution_min < 2 || axis_resolution_max < axis_resolution_min)
        throw std::invalid_argument("axis resolution range must satisfy 2 <= min <= max");
    if (connection_probability_min < 0.0 || connection_probability_max > 1.0 ||
        connection_probability_max < connection_probability_min)
        throw std::invalid_argument("connection probability range must lie in [0,1]");
    if (edge_thickness_min <= 0.0 || edge_thickness_max < edge_thickness_min)
        throw std::invalid_argument("edge thickness range must be positive and ordered");
}

double box_signed_distance(const Box& box, const Vec3& p) {
    const Vec3 c = 0.5 * (box.min + box.max);
    const Vec3 h = 0.5 * (box.max - box.min);
    const Vec3 q{std::abs(p.x - c.x) - h.x, std::abs(p.y - c.y) - h.y, std::abs(p.z - c.z) - h.z};
    const Vec3 outside{std::max(q.x, 0.0), std::max(q.y, 0.0), std::max(q.z, 0.0)};
    return norm(outside) + std::min(max_component(q), 0.0);
}

double Environment::distance(const Vec3& p) const {
    double best = std::numeric_limits<double>::infinity();
    for (const Box& b : boxes) best = std::min(best, box_signed_distance(b, p));
    return best;
}

Vec3 Environment::distance_gradient(const Vec3& p) const {
    if (boxes.empty()) return {};
    double best = std::numeric_limits<double>::infinity();
    const Box* closest = nullptr;
    for (const Box& b : boxes) {
        const double d = box_signed_distance(b, p);
        if (d < best) {
            best = d;
            closest = &b;
        }
    }
    const Vec3 c = 0.5 * (closest->min + closest->max);
    const Vec3 h = 0.5 * (closest->max - closest->min);
    const Vec3 rel = p - c;
    const Vec3 q{std::abs(rel.x) - h.x, std::abs(rel.y) - h.y, std::abs(rel.z) - h.z};
    auto sign = [](double v) { return v >= 0.0 ? 1.0 : -1.0; };
    if (best > 0.0) {
        Vec3 g{std::max(q.x, 0.0) * sign(rel.x), std::max(q.y, 0.0) * sign(rel.y),
               std::max(q.z, 0.0) * sign(rel.z)};
        return normalized(g);
    }
    // Inside: fastest way out is through the nearest face.
    int axis = 0;
    if (q.y > q[axis]) axis = 1;
    if (q.z > q[axis]) axis = 2;
    Vec3 g{};
    g[axis] = sign(rel[axis]);
    return g;
}

Environment random_grid_environment(const RandomGridSpec& spec, std::uint64_t rng_seed) {
    spec.validate();
    Rng rng(rng_seed);
    Environment env;
    env.cube_side = spec.cube_side;
    env.provenance = "randomGrid(seed=" + std::to_string(rng_seed) + ")";

    const int n = spec.chunks_per_axis;
    const double side = spec.subchunk_side;
    const double half_cube = 0.5 * spec.cube_side;
    const Box cube = env.bounding_cube();

    for (int cz = 0; cz < n; ++cz) {
        for (int cy = 0; cy < n; ++cy) {
            for (int cx = 0; cx < n; ++cx) {
                const Vec3 origin{-half_cube + cx * side, -half_cube + cy * side,
                                  -half_cube + cz * side};
                const int rx = rng.uniform_int(spec.axis_resolution_min, spec.axis_resolution_max);
                const int ry = rng.uniform_int(spec.axis_resolution_min, spec.axis_resolution_max);
                const int rz = rng.uniform_int(spec.axis_resolution_min, spec.axis_resolution_max);
                const double p = rng.uniform(spec.connection_probability_min,
                                             spec.connection_probability_max);
                const double t = rng.uniform(spec.edge_thickness_min, spec.edge_thickness_max);

                // Lattice points span the subchunk, faces included.
                auto coord = [&](int axis, int idx, int res) {
                    return origin[axis] + side * static_cast<double>(idx) / (res - 1);
                };
                const int res[3] = {rx, ry, rz};
                for (int iz = 0; iz < rz; ++iz) {
                    for (int iy = 0; iy < ry; ++iy) {
                        for (int ix = 0; ix < rx; ++ix) {
                            const int idx[3] = {ix, iy, iz};
                            const Vec3 a{coord(0, ix, rx), coord(1, iy, ry), coord(2, iz, rz)};
                            for (int axis = 0; axis < 3; ++axis) {
                                if (idx[axis] + 1 >= res[axis]) continue;
                                // Draw for every adjacency so the consumption
                                // order is a fixed function of the spec.
                                const bool connect = rng.bernoulli(p);
                                if (!connect) continue;
                                Vec3 b = a;
                                b[axis] = coord(axis, idx[axis] + 1, res[axis]);
                                Box box{a - Vec3{t / 2, t / 2, t / 2}, b + Vec3{t / 2, t / 2, t / 2}};
                                box.min = cwise_max(box.min, cube.min);
                                box.max = cwise_min(box.max, cube.max);
                                env.boxes.push_back(box);
                            }
                        }
                    }
                }
            }
        }
    }
    return env;
}

void save_environment_obj(const Environment& env, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    std::int64_t base = 1;
    for (const Box& b : env.boxes) {
        for (int corner = 0; corner < 8; ++corner) {
            const double x = (corner & 1) ? b.max.x : b.min.x;
            const double y = (corner & 2) ? b.max.y : b.min.y;
            const double z = (corner & 4) ? b.max.z : b.min.z;
            out << "v " << x << ' ' << y << ' ' << z << '\n';
        }
        // 12 triangles, outward winding; corners indexed by bit pattern (x|y<<1|z<<2)
        static const int quads[6][4] = {
            {0, 4, 6, 2},  // -x
            {1, 3, 7, 5},  // +x
            {0, 1, 5, 4},  // -y
            {2, 6, 7, 3},  // +y
            {0, 2, 3, 1},  // -z
            {4, 5, 7, 6},  // +z
        };
        for (const auto& q : quads) {
            out << "f " << base + q[0] << ' ' << base + q[1] << ' ' << base + q[2] << '\n';
            out << "f " << base + q[0] << ' ' << base + q[2] << ' ' << base + q[3] << '\n';
        }
        base += 8;
    }
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace topogrow
