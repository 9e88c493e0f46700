#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "topogrow/vec3.hpp"

namespace topogrow {

struct RandomGridSpec {
    double cube_side = 20.0;
    int chunks_per_axis = 5;
    double subchunk_side = 4.0;
    int axis_resolution_min = 2;
    int axis_resolution_max = 4;
    double connection_probability_min = 0.15;
    double connection_probability_max = 0.25;
    double edge_thickness_min = 0.4;
    double edge_thickness_max = 0.6;

    void validate() const;
};

struct Box {
    Vec3 min, max;
};

double box_signed_distance(const Box& box, const Vec3& p);

/// Union of axis-aligned obstacle boxes inside a bounding cube centered at
/// the origin. Immutable; distance queries are safe to call concurrently.
struct Environment {
    std::vector<Box> boxes;
    double cube_side = 20.0;
    std::string provenance;

    Box bounding_cube() const {
        const double h = 0.5 * cube_side;
        return {{-h, -h, -h}, {h, h, h}};
    }

    /// Min over boxes of the signed box distance; +inf when empty.
    double distance(const Vec3& p) const;

    /// Unit gradient of `distance` at p (direction of fastest increase).
    Vec3 distance_gradient(const Vec3& p) const;
};

/// Per subchunk: draw per-axis lattice resolutions, a connection probability P
/// and a strut thickness T; connect axis-adjacent lattice points with
/// probability P and emit a box of T x T cross-section around each connected
/// edge, padded by T/2 at both ends, clamped to the bounding cube.
/// Pure function of (spec, rng_seed).
Environment random_grid_environment(const RandomGridSpec& spec, std::uint64_t rng_seed);

/// All boxes as triangulated cuboids, for visualization.
void save_environment_obj(const Environment& env, const std::filesystem::path& path);

}  // namespace topogrow
