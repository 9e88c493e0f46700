#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "topogrow/mesh.hpp"
#include "topogrow/vec3.hpp"

namespace topogrow {

/// Cubic binary occupancy volume. Occupancy is x-fastest; the world transform
/// maps voxel (0,0,0)'s min corner to `origin` with uniform `voxel_size`.
struct VoxelGrid {
    int resolution = 0;
    std::vector<std::uint8_t> occupancy;
    Vec3 origin;
    double voxel_size = 1.0;

    static VoxelGrid empty(int resolution, Vec3 origin = {}, double voxel_size = 1.0);

    std::size_t index(int x, int y, int z) const {
        return (static_cast<std::size_t>(z) * resolution + y) * resolution + x;
    }
    bool at(int x, int y, int z) const { return occupancy[index(x, y, z)] != 0; }
    void set(int x, int y, int z, bool value) { occupancy[index(x, y, z)] = value ? 1 : 0; }
    bool in_range(int x, int y, int z) const {
        return x >= 0 && y >= 0 && z >= 0 && x < resolution && y < resolution && z < resolution;
    }
    Vec3 voxel_center(int x, int y, int z) const {
        return origin + voxel_size * Vec3{x + 0.5, y + 0.5, z + 0.5};
    }
    std::int64_t occupied_count() const;
};

/// Solid (filled) rasterization: a voxel is occupied iff its center lies
/// inside the mesh, by axis-parallel ray parity with jittered retries on
/// grazing hits. The mesh bounding box is fitted with a 2-voxel pad.
VoxelGrid voxelize_solid(const TriangleMesh& mesh, int resolution);

/// Internal knob for the parity-invariance property: rays go along +x or -x.
VoxelGrid voxelize_solid_directed(const TriangleMesh& mesh, int resolution, int ray_direction);

struct NoiseOctaveSpec {
    double scale = 4.0;
    double threshold = 0.5;
    enum class Mode { Add, Subtract } mode = Mode::Add;
};

/// The production octave stack: (4, 0.5, add), (8, 0.55, add), (16, 0.55, subtract).
std::vector<NoiseOctaveSpec> default_noise_octaves();

/// Each octave thresholds seeded gradient noise sampled at voxel centers with
/// frequency scale/resolution; add-mode unions the mask, subtract-mode removes it.
VoxelGrid apply_noise_octaves(const VoxelGrid& grid, const std::vector<NoiseOctaveSpec>& octaves,
                              std::uint64_t rng_seed);

/// Separable Gaussian blur of the 0/1 field (radius ceil(3*sigma), renormalized),
/// re-binarized at 0.5. sigma is in voxel units; sigma = 0 is the identity.
VoxelGrid gaussian_smooth_binarize(const VoxelGrid& grid, double sigma);

struct PointCloud {
    std::vector<Vec3> points;
};

/// Uniform over occupied voxels with replacement, jittered within each cell.
PointCloud sample_point_cloud(const VoxelGrid& grid, int count, std::uint64_t rng_seed);

struct SliceImage {
    int width = 0, height = 0;
    std::vector<std::uint8_t> pixels;  // 0 background / 1 foreground, row-major
    bool at(int u, int v) const { return pixels[static_cast<std::size_t>(v) * width + u] != 0; }
};

/// Plane of occupancy values orthogonal to `axis` (0=x, 1=y, 2=z) at `index`.
SliceImage extract_slice(const VoxelGrid& grid, int axis, int index);

/// "TGV1" format: magic, uint32 resolution, uint64 payload bytes (little-endian),
/// then 1 bit per voxel, x-fastest, LSB-first, padded to a whole byte.
void save_voxel_grid(const VoxelGrid& grid, const std::filesystem::path& path);
VoxelGrid load_voxel_grid(const std::filesystem::path& path);

/// ASCII XYZ, one "x y z" line per point.
void save_point_cloud_xyz(const PointCloud& cloud, const std::filesystem::path& path);

/// Binary PGM (P5), foreground 255.
void save_slice_pgm(const SliceImage& image, const std::filesystem::path& path);

}  // namespace topogrow
