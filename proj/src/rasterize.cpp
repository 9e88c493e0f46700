#include "topogrow/rasterize.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "topogrow/errors.hpp"
#include "topogrow/noise.hpp"
#include "topogrow/rng.hpp"

namespace topogrow {

VoxelGrid VoxelGrid::empty(int resolution, Vec3 origin, double voxel_size) {
    if (resolution <= 0) throw std::invalid_argument("resolution must be positive");
    VoxelGrid g;
    g.resolution = resolution;
    g.occupancy.assign(static_cast<std::size_t>(resolution) * resolution * resolution, 0);
    g.origin = origin;
    g.voxel_size = voxel_size;
    return g;
}

std::int64_t VoxelGrid::occupied_count() const {
    std::int64_t n = 0;
    for (std::uint8_t v : occupancy) n += v;
    return n;
}

namespace {

/// Crossing positions of an axis ray with the mesh, at (u, v) in the two
/// non-ray coordinates. Returns false when a hit grazes an edge or vertex.
bool collect_crossings(const TriangleMesh& mesh, const std::vector<std::int32_t>& tris,
                       int ray_axis, double u, double v, std::vector<double>& out) {
    out.clear();
    const int ua = (ray_axis + 1) % 3, va = (ray_axis + 2) % 3;
    const auto& verts = mesh.vertices();
    for (std::int32_t t : tris) {
        const auto& f = mesh.faces()[t];
        const Vec3 &p0 = verts[f[0]], &p1 = verts[f[1]], &p2 = verts[f[2]];
        const double au = p0[ua] - u, av = p0[va] - v;
        const double bu = p1[ua] - u, bv = p1[va] - v;
        const double cu = p2[ua] - u, cv = p2[va] - v;
        // Signed areas of the projected sub-triangles around the ray point.
        const double w0 = bu * cv - bv * cu;
        const double w1 = cu * av - cv * au;
        const double w2 = au * bv - av * bu;
        const double area = w0 + w1 + w2;
        const double scale = std::abs(w0) + std::abs(w1) + std::abs(w2);
        const double eps = 1e-12 * std::max(scale, 1e-300);
        if (std::abs(area) <= eps) continue;  // projected degenerate: ray-parallel
        const bool pos = w0 > eps && w1 > eps && w2 > eps;
        const bool neg = w0 < -eps && w1 < -eps && w2 < -eps;
        if (!pos && !neg) {
            // On or near an edge/vertex of the projection.
            if ((w0 >= -eps && w1 >= -eps && w2 >= -eps) ||
                (w0 <= eps && w1 <= eps && w2 <= eps))
                return false;
            continue;
        }
        const double x =
            (w0 * p0[ray_axis] + w1 * p1[ray_axis] + w2 * p2[ray_axis]) / area;
        out.push_back(x);
    }
    std::sort(out.begin(), out.end());
    return true;
}

}  // namespace

VoxelGrid voxelize_solid_directed(const TriangleMesh& mesh, int resolution, int ray_direction) {
    if (resolution < 8) throw std::invalid_argument("resolution must be at least 8");
    const Vec3 lo = mesh.bbox_min(), hi = mesh.bbox_max();
    const Vec3 extent = hi - lo;
    const double max_extent = max_component(extent);
    if (max_extent <= 0.0) throw std::invalid_argument("mesh has zero extent");

    // Fit the bounding box into resolution - 4 voxels, leaving a 2-voxel pad.
    const double h = max_extent / (resolution - 4);
    const Vec3 center = 0.5 * (lo + hi);
    const Vec3 origin = center - (0.5 * resolution * h) * Vec3{1, 1, 1};
    VoxelGrid grid = VoxelGrid::empty(resolution, origin, h);

    const Vec3 grid_hi = origin + (resolution * h) * Vec3{1, 1, 1};
    for (int k = 0; k < 3; ++k)
        if (lo[k] < origin[k] + 1.5 * h || hi[k] > grid_hi[k] - 1.5 * h)
            throw std::invalid_argument("mesh exceeds grid bounds");

    // Bin triangles by the (y, z) rows their projection may touch.
    const int ray_axis = 0, ua = 1, va = 2;
    const auto& verts = mesh.vertices();
    std::vector<std::vector<std::int32_t>> rows(static_cast<std::size_t>(resolution) * resolution);
    for (std::int32_t t = 0; t < static_cast<std::int32_t>(mesh.faces().size()); ++t) {
        const auto& f = mesh.faces()[t];
        double ulo = verts[f[0]][ua], uhi = ulo, vlo = verts[f[0]][va], vhi = vlo;
        for (int k = 1; k < 3; ++k) {
            ulo = std::min(ulo, verts[f[k]][ua]);
            uhi = std::max(uhi, verts[f[k]][ua]);
            vlo = std::min(vlo, verts[f[k]][va]);
            vhi = std::max(vhi, verts[f[k]][va]);
        }
        const int iu0 = std::max(0, static_cast<int>(std::floor((ulo - origin[ua]) / h - 0.5)));
        const int iu1 = std::min(resolution - 1, static_cast<int>(std::ceil((uhi - origin[ua]) / h)));
        const int iv0 = std::max(0, static_cast<int>(std::floor((vlo - origin[va]) / h - 0.5)));
        const int iv1 = std::min(resolution - 1, static_cast<int>(std::ceil((vhi - origin[va]) / h)));
        for (int iv = iv0; iv <= iv1; ++iv)
            for (int iu = iu0; iu <= iu1; ++iu)
                rows[static_cast<std::size_t>(iv) * resolution + iu].push_back(t);
    }

    std::vector<double> crossings;
    for (int iv = 0; iv < resolution; ++iv) {
        for (int iu = 0; iu < resolution; ++iu) {
            const auto& tris = rows[static_cast<std::size_t>(iv) * resolution + iu];
            if (tris.empty()) continue;
            bool ok = false;
            for (int attempt = 0; attempt < 12 && !ok; ++attempt) {
                // Deterministic sub-voxel jitter, first attempt unjittered.
                const double ju = attempt * h * 1.1e-4;
                const double jv = attempt * h * 0.73e-4;
                const double u = origin[ua] + (iu + 0.5) * h + ju;
                const double v = origin[va] + (iv + 0.5) * h + jv;
                if (!collect_crossings(mesh, tris, ray_axis, u, v, crossings)) continue;
                ok = true;
                // A crossing landing exactly on a voxel center means the center
                // sits on the surface; the tie-break (strictly-before counts)
                // assigns it consistently, and meshes in general position
                // never produce the tie.
                const double tie = 1e-9 * h;
                std::size_t next = 0;
                int parity = 0;
                if (ray_direction >= 0) {
                    for (int ix = 0; ix < resolution; ++ix) {
                        const double x = origin[ray_axis] + (ix + 0.5) * h;
                        while (next < crossings.size() && crossings[next] < x - tie) {
                            ++next;
                            parity ^= 1;
                        }
                        if (parity) grid.set(ix, iu, iv, true);
                    }
                } else {
                    for (int ix = resolution - 1; ix >= 0; --ix) {
                        const double x = origin[ray_axis] + (ix + 0.5) * h;
                        while (next < crossings.size() &&
                               crossings[crossings.size() - 1 - next] > x + tie) {
                            ++next;
                            parity ^= 1;
                        }
                        if (parity) grid.set(ix, iu, iv, true);
                    }
                }
            }
            if (!ok)
                throw StructuralError("voxelization could not resolve grazing ray at row (" +
                                      std::to_string(iu) + "," + std::to_string(iv) + ")");
        }
    }
    return grid;
}

VoxelGrid voxelize_solid(const TriangleMesh& mesh, int resolution) {
    return voxelize_solid_directed(mesh, resolution, +1);
}

std::vector<NoiseOctaveSpec> default_noise_octaves() {
    return {{4.0, 0.5, NoiseOctaveSpec::Mode::Add},
            {8.0, 0.55, NoiseOctaveSpec::Mode::Add},
            {16.0, 0.55, NoiseOctaveSpec::Mode::Subtract}};
}

VoxelGrid apply_noise_octaves(const VoxelGrid& grid, const std::vector<NoiseOctaveSpec>& octaves,
                              std::uint64_t rng_seed) {
    VoxelGrid out = grid;
    const int r = grid.resolution;
    for (std::size_t oi = 0; oi < octaves.size(); ++oi) {
        const NoiseOctaveSpec& spec = octaves[oi];
        const PerlinNoise3 noise(hash_mix({rng_seed, static_cast<std::uint64_t>(oi)}));
        const double freq = spec.scale / r;
        const bool add = spec.mode == NoiseOctaveSpec::Mode::Add;
        std::size_t i = 0;
        for (int z = 0; z < r; ++z)
            for (int y = 0; y < r; ++y)
                for (int x = 0; x < r; ++x, ++i) {
                    const Vec3 p{(x + 0.5) * freq, (y + 0.5) * freq, (z + 0.5) * freq};
                    const bool mask = noise.value01(p) >= spec.threshold;
                    if (!mask) continue;
                    out.occupancy[i] = add ? 1 : 0;
                }
    }
    return out;
}

VoxelGrid gaussian_smooth_binarize(const VoxelGrid& grid, double sigma) {
    if (sigma < 0.0) throw std::invalid_argument("sigma must be nonnegative");
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    if (radius == 0) return grid;

    std::vector<double> kernel(2 * radius + 1);
    double total = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        kernel[k + radius] = std::exp(-0.5 * (k * k) / (sigma * sigma));
        total += kernel[k + radius];
    }
    for (double& w : kernel) w /= total;

    const int r = grid.resolution;
    std::vector<double> a(grid.occupancy.begin(), grid.occupancy.end());
    std::vector<double> b(a.size(), 0.0);

    auto pass = [&](const std::vector<double>& src, std::vector<double>& dst, int axis) {
        const std::size_t stride = axis == 0 ? 1
                                 : axis == 1 ? static_cast<std::size_t>(r)
                                             : static_cast<std::size_t>(r) * r;
        std::fill(dst.begin(), dst.end(), 0.0);
        std::size_t i = 0;
        for (int z = 0; z < r; ++z)
            for (int y = 0; y < r; ++y)
                for (int x = 0; x < r; ++x, ++i) {
                    const int c = axis == 0 ? x : axis == 1 ? y : z;
                    double acc = 0.0;
                    for (int k = -radius; k <= radius; ++k) {
                        const int cc = c + k;
                        if (cc < 0 || cc >= r) continue;  // zero padding outside
                        acc += kernel[k + radius] * src[i + static_cast<std::ptrdiff_t>(k) * stride];
                    }
                    dst[i] = acc;
                }
    };
    pass(a, b, 0);
    pass(b, a, 1);
    pass(a, b, 2);

    VoxelGrid out = grid;
    for (std::size_t i = 0; i < b.size(); ++i) out.occupancy[i] = b[i] >= 0.5 ? 1 : 0;
    return out;
}

PointCloud sample_point_cloud(const VoxelGrid& grid, int count, std::uint64_t rng_seed) {
    if (count <= 0) throw std::invalid_argument("point count must be positive");
    std::vector<std::size_t> occupied;
    for (std::size_t i = 0; i < grid.occupancy.size(); ++i)
        if (grid.occupancy[i]) occupied.push_back(i);
    if (occupied.empty()) throw std::invalid_argument("cannot sample an empty grid");

    Rng rng(rng_seed);
    PointCloud cloud;
    cloud.points.reserve(count);
    const int r = grid.resolution;
    for (int n = 0; n < count; ++n) {
        const std::size_t i = occupied[rng.next_below(occupied.size())];
        const int x = static_cast<int>(i % r);
        const int y = static_cast<int>((i / r) % r);
        const int z = static_cast<int>(i / (static_cast<std::size_t>(r) * r));
        const Vec3 jitter{rng.next_double(), rng.next_double(), rng.next_double()};
        cloud.points.push_back(grid.origin +
                               grid.voxel_size * (Vec3{static_cast<double>(x), static_cast<double>(y),
                                                       static_cast<double>(z)} +
                                                  jitter));
    }
    return cloud;
}

SliceImage extract_slice(const VoxelGrid& grid, int axis, int index) {
    if (axis < 0 || axis > 2) throw std::invalid_argument("axis must be 0, 1 or 2");
    if (index < 0 || index >= grid.resolution)
        throw std::invalid_argument("slice index " + std::to_string(index) + " out of range");
    const int r = grid.resolution;
    SliceImage img;
    img.width = r;
    img.height = r;
    img.pixels.assign(static_cast<std::size_t>(r) * r, 0);
    for (int v = 0; v < r; ++v) {
        for (int u = 0; u < r; ++u) {
            const bool value = axis == 0   ? grid.at(index, u, v)
                               : axis == 1 ? grid.at(u, index, v)
                                           : grid.at(u, v, index);
            img.pixels[static_cast<std::size_t>(v) * r + u] = value ? 1 : 0;
        }
    }
    return img;
}

void save_voxel_grid(const VoxelGrid& grid, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    const std::uint64_t n_voxels = static_cast<std::uint64_t>(grid.resolution) *
                                   grid.resolution * grid.resolution;
    const std::uint64_t payload = (n_voxels + 7) / 8;
    out.write("TGV1", 4);
    const std::uint32_t res = static_cast<std::uint32_t>(grid.resolution);
    out.write(reinterpret_cast<const char*>(&res), 4);
    out.write(reinterpret_cast<const char*>(&payload), 8);
    std::vector<std::uint8_t> bits(payload, 0);
    for (std::uint64_t i = 0; i < n_voxels; ++i)
        if (grid.occupancy[i]) bits[i >> 3] |= static_cast<std::uint8_t>(1u << (i & 7));
    out.write(reinterpret_cast<const char*>(bits.data()), static_cast<std::streamsize>(payload));
    if (!out) throw IoError("write failed: " + path.string());
}

VoxelGrid load_voxel_grid(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "TGV1", 4) != 0)
        throw IoError("not a TGV1 file: " + path.string());
    std::uint32_t res = 0;
    std::uint64_t payload = 0;
    in.read(reinterpret_cast<char*>(&res), 4);
    in.read(reinterpret_cast<char*>(&payload), 8);
    const std::uint64_t n_voxels = static_cast<std::uint64_t>(res) * res * res;
    if (payload != (n_voxels + 7) / 8)
        throw IoError("payload length mismatch in " + path.string());
    std::vector<std::uint8_t> bits(payload);
    in.read(reinterpret_cast<char*>(bits.data()), static_cast<std::streamsize>(payload));
    if (!in) throw IoError("truncated voxel payload: " + path.string());
    VoxelGrid grid = VoxelGrid::empty(static_cast<int>(res));
    for (std::uint64_t i = 0; i < n_voxels; ++i)
        grid.occupancy[i] = (bits[i >> 3] >> (i & 7)) & 1;
    return grid;
}

void save_point_cloud_xyz(const PointCloud& cloud, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    std::string buffer;
    char tmp[32];
    for (const Vec3& p : cloud.points) {
        for (int k = 0; k < 3; ++k) {
            const auto res = std::to_chars(tmp, tmp + sizeof(tmp), p[k]);
            buffer.append(tmp, res.ptr);
            buffer += (k == 2) ? '\n' : ' ';
        }
    }
    out << buffer;
    if (!out) throw IoError("write failed: " + path.string());
}

void save_slice_pgm(const SliceImage& image, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
    std::vector<std::uint8_t> raster(image.pixels.size());
    for (std::size_t i = 0; i < image.pixels.size(); ++i) raster[i] = image.pixels[i] ? 255 : 0;
    out.write(reinterpret_cast<const char*>(raster.data()),
              static_cast<std::streamsize>(raster.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace topogrow
