#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "topogrow/envgen.hpp"
#include "topogrow/mesh.hpp"
#include "topogrow/rng.hpp"

namespace topogrow {

struct PlacementParams {
    Vec3 rotation;                   ///< per-axis angles in [0, 2pi)
    double uniform_scale_jitter = 0.0;   ///< in [-0.25, 0.25]
    Vec3 anisotropic_scale_jitter;       ///< each in [-0.5, 0.5]
};

PlacementParams draw_placement_params(Rng& rng);

/// One deterministic placement pass: center the seed's bounding box on the
/// environment cube center, rotate, scale surface area to 1, apply the uniform
/// then the per-axis jitter (all about the cube center). No feasibility check.
TriangleMesh apply_placement(const TriangleMesh& seed, const Environment& env,
                             const PlacementParams& params);

/// Any contact between the surface and the obstacle boxes, or containment
/// either way.
bool mesh_intersects_environment(const TriangleMesh& mesh, const Environment& env);

/// Draw placements until one clears the environment.
/// Throws PlacementError after max_retries failed draws.
TriangleMesh place_seed(const TriangleMesh& seed, const Environment& env, Rng& rng,
                        int max_retries = 64);

/// One ordered pair's kernel value:
///   |n_s . (c_t - c_s)|^alpha / |c_t - c_s|^beta * area_s * area_t.
double tangent_point_pair_term(const Vec3& centroid_s, const Vec3& unit_normal_s, double area_s,
                               const Vec3& centroid_t, double area_t, double alpha, double beta);

/// Tangent-point pair energy over ordered pairs of non-adjacent triangles,
/// single-point (centroid) quadrature:
///   |n_S . (c_T - c_S)|^alpha / |c_T - c_S|^beta * area(S) * area(T).
/// Pairs farther apart than `cutoff` are dropped (default: no cutoff).
/// Throws SingularConfigurationError on coincident non-adjacent centroids.
double tangent_point_energy(const TriangleMesh& mesh, double alpha = 2.0, double beta = 8.0,
                            double cutoff = std::numeric_limits<double>::infinity());

/// Exact analytic gradient of tangent_point_energy with respect to vertex
/// positions (centroid, normal and area dependencies included).
std::vector<Vec3> tangent_point_gradient(const TriangleMesh& mesh, double alpha = 2.0,
                                         double beta = 8.0,
                                         double cutoff = std::numeric_limits<double>::infinity());

struct GrowthConfig {
    double target_area_multiplier = 4.0;
    double inflation_step_length = 0.05;  ///< fraction of mean edge length
    double descent_step_length = 0.1;     ///< repulsive step cap, fraction of mean edge length;
                                          ///< kept above the inflation step so contacts reopen
    double alpha = 2.0;
    double beta = 8.0;
    double environment_penalty_weight = 1.0;
    double environment_margin = 0.05;  ///< world units
    int max_iterations = 1500;
    std::vector<double> snapshot_fractions{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    double cutoff_factor = 10.0;       ///< far-field cutoff in mean edge lengths; <= 0 disables
    bool smooth_gradient = false;      ///< one Jacobi sweep over the gradient field
    /// Acceptance also rejects steps that bring topologically distant surface
    /// patches closer than this fraction of the initial mean edge length.
    /// Without the floor, inflation ratchets tunnel walls into numerical
    /// contact, where no admissible step remains. 0 disables.
    double contact_floor_factor = 0.25;
    /// Tangential Laplacian fairing mixed into each step. Stretching without
    /// remeshing degrades elements until neighborhoods fold over and wedge the
    /// acceptance test; fairing keeps them usable. 0 disables.
    double fairing_weight = 0.3;

    void validate() const;  ///< requires beta > alpha + 2, sorted fractions in [0,1]
};

struct GrowthSnapshot {
    TriangleMesh mesh;
    int complexity_level = 0;
    double area_ratio = 1.0;
    int iteration_index = 0;
    std::int64_t chi = 0;
};

struct GrowthTraceRow {
    int iteration = 0;
    double energy = 0.0;
    double area_ratio = 1.0;
    bool accepted = false;
};

struct GrowthResult {
    std::vector<GrowthSnapshot> snapshots;
    std::vector<GrowthTraceRow> trace;
    int accepted_steps = 0;
    int rejected_steps = 0;
    /// Accepted steps where V/E/F or chi changed, or a self-intersection
    /// slipped through the acceptance test. Zero on any healthy run.
    int topology_violations = 0;
    double final_area_ratio = 1.0;
};

/// Constrained growth by normal inflation plus repulsive descent with
/// backtracking, an environment penalty push, and an acceptance test
/// (no self-intersection, no vertex inside an obstacle). Rejected steps halve
/// the whole displacement; below the floor the iteration is skipped.
/// Snapshots fire when the area ratio first reaches
/// 1 + fraction * (target - 1). Deterministic given all arguments.
/// Throws GrowthStalledError when max_iterations pass before all snapshots;
/// `on_trace`, when set, still sees every row up to the stall.
GrowthResult grow(const TriangleMesh& placed_seed, const Environment& env,
                  const GrowthConfig& config, std::uint64_t rng_seed,
                  const std::function<void(const GrowthTraceRow&)>& on_trace = {});

/// Per-vertex offset along the normal by intensity * (cellular noise - 0.5),
/// noise sampled at position / feature_size. If the result self-intersects the
/// intensity is halved, up to 8 times; then throws DisplacementError.
TriangleMesh cellular_displacement(const TriangleMesh& mesh, double intensity,
                                   double feature_size, std::uint64_t rng_seed);

}  // namespace topogrow
