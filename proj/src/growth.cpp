#include "topogrow/growth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <unordered_set>

#include "topogrow/errors.hpp"
#include "topogrow/intersect.hpp"
#include "topogrow/noise.hpp"

namespace topogrow {

PlacementParams draw_placement_params(Rng& rng) {
    PlacementParams p;
    const double two_pi = 6.283185307179586476925286766559;
    p.rotation = {rng.uniform(0.0, two_pi), rng.uniform(0.0, two_pi), rng.uniform(0.0, two_pi)};
    p.uniform_scale_jitter = rng.uniform(-0.25, 0.25);
    p.anisotropic_scale_jitter = {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5),
                                  rng.uniform(-0.5, 0.5)};
    return p;
}

TriangleMesh apply_placement(const TriangleMesh& seed, const Environment& env,
                             const PlacementParams& params) {
    (void)env;  // the bounding cube is centered at the origin by construction
    const Vec3 center = 0.5 * (seed.bbox_min() + seed.bbox_max());
    const Mat3 rot = euler_rotation(params.rotation);

    std::vector<Vec3> positions;
    positions.reserve(seed.vertices().size());
    for (const Vec3& v : seed.vertices()) positions.push_back(rot.apply(v - center));

    TriangleMesh mesh = seed.with_positions(std::move(positions));
    const double area = surface_area(mesh);
    const double unit = 1.0 / std::sqrt(area);
    const double uniform = unit * (1.0 + params.uniform_scale_jitter);
    const Vec3 aniso{uniform * (1.0 + params.anisotropic_scale_jitter.x),
                     uniform * (1.0 + params.anisotropic_scale_jitter.y),
                     uniform * (1.0 + params.anisotropic_scale_jitter.z)};

    std::vector<Vec3> scaled;
    scaled.reserve(mesh.vertices().size());
    for (const Vec3& v : mesh.vertices())
        scaled.push_back({v.x * aniso.x, v.y * aniso.y, v.z * aniso.z});
    return mesh.with_positions(std::move(scaled));
}

bool mesh_intersects_environment(const TriangleMesh& mesh, const Environment& env) {
    if (env.boxes.empty()) return false;
    for (const Vec3& v : mesh.vertices())
        if (env.distance(v) < 0.0) return true;

    const AabbTree tree(mesh);
    const auto& verts = mesh.vertices();
    for (const Box& box : env.boxes) {
        for (std::int32_t t : tree.query_box(box.min, box.max)) {
            const auto& f = mesh.faces()[t];
            if (triangle_box_overlap({verts[f[0]], verts[f[1]], verts[f[2]]}, box.min, box.max))
                return true;
        }
        // No surface contact; the box may still sit entirely inside the mesh.
        if (point_inside_mesh(mesh, 0.5 * (box.min + box.max))) return true;
    }
    return false;
}

TriangleMesh place_seed(const TriangleMesh& seed, const Environment& env, Rng& rng,
                        int max_retries) {
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        const PlacementParams params = draw_placement_params(rng);
        TriangleMesh placed = apply_placement(seed, env, params);
        if (!mesh_intersects_environment(placed, env)) return placed;
    }
    throw PlacementError("no environment-clear placement found in " +
                         std::to_string(max_retries) + " attempts");
}

namespace {

struct TriangleData {
    Vec3 centroid;
    Vec3 unit_normal;
    Vec3 raw_normal;  // (p1-p0) x (p2-p0), length 2*area
    double area;
};

std::vector<TriangleData> triangle_data(const TriangleMesh& mesh) {
    std::vector<TriangleData> data(mesh.faces().size());
    const auto& v = mesh.vertices();
    for (std::size_t i = 0; i < mesh.faces().size(); ++i) {
        const auto& f = mesh.faces()[i];
        TriangleData& t = data[i];
        t.centroid = (v[f[0]] + v[f[1]] + v[f[2]]) / 3.0;
        t.raw_normal = cross(v[f[1]] - v[f[0]], v[f[2]] - v[f[0]]);
        const double len = norm(t.raw_normal);
        t.area = 0.5 * len;
        t.unit_normal = len > 0.0 ? t.raw_normal / len : Vec3{};
    }
    return data;
}

bool faces_adjacent(const TriangleMesh::Face& a, const TriangleMesh::Face& b) {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (a[i] == b[j]) return true;
    return false;
}

double singular_threshold(const TriangleMesh& mesh) {
    const double diag = norm(mesh.bbox_max() - mesh.bbox_min());
    return 1e-12 * std::max(diag, 1e-30);
}

/// r2^(-beta/2); repeated multiplication when beta is an even integer (the
/// default 8 keeps the pair loop off the std::pow path).
double inv_r_to_beta(double r2, double beta) {
    const int b = static_cast<int>(beta);
    if (b == beta && b % 2 == 0 && b >= 0 && b <= 32) {
        const double inv = 1.0 / r2;
        double out = 1.0;
        for (int k = 0; k < b / 2; ++k) out *= inv;
        return out;
    }
    return std::pow(r2, -0.5 * beta);
}

double abs_u_to_alpha(double au, double alpha) {
    if (alpha == 2.0) return au * au;
    return std::pow(au, alpha);
}

}  // namespace

double tangent_point_pair_term(const Vec3& centroid_s, const Vec3& unit_normal_s, double area_s,
                               const Vec3& centroid_t, double area_t, double alpha, double beta) {
    const Vec3 d = centroid_t - centroid_s;
    const double r2 = norm2(d);
    return std::pow(std::abs(dot(unit_normal_s, d)), alpha) * std::pow(r2, -0.5 * beta) *
           area_s * area_t;
}

double tangent_point_energy(const TriangleMesh& mesh, double alpha, double beta, double cutoff) {
    const auto data = triangle_data(mesh);
    const auto& faces = mesh.faces();
    const double cutoff2 = cutoff * cutoff;
    const double singular2 = singular_threshold(mesh) * singular_threshold(mesh);

    double sum = 0.0, comp = 0.0;  // Kahan
    for (std::size_t i = 0; i < faces.size(); ++i) {
        for (std::size_t j = i + 1; j < faces.size(); ++j) {
            if (faces_adjacent(faces[i], faces[j])) continue;
            const Vec3 d = data[j].centroid - data[i].centroid;
            const double r2 = norm2(d);
            if (r2 > cutoff2) continue;
            if (r2 < singular2)
                throw SingularConfigurationError(
                    "coincident centroids of non-adjacent triangles " + std::to_string(i) +
                    " and " + std::to_string(j));
            const double inv_rb = inv_r_to_beta(r2, beta);
            const double aa = data[i].area * data[j].area;
            // ordered pair (i, j) plus ordered pair (j, i)
            const double ui = std::abs(dot(data[i].unit_normal, d));
            const double uj = std::abs(dot(data[j].unit_normal, d));
            const double pair =
                (abs_u_to_alpha(ui, alpha) + abs_u_to_alpha(uj, alpha)) * inv_rb * aa;
            const double y = pair - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
    }
    return sum;
}

std::vector<Vec3> tangent_point_gradient(const TriangleMesh& mesh, double alpha, double beta,
                                         double cutoff) {
    const auto data = triangle_data(mesh);
    const auto& faces = mesh.faces();
    const auto& verts = mesh.vertices();
    const double cutoff2 = cutoff * cutoff;
    const double singular2 = singular_threshold(mesh) * singular_threshold(mesh);

    std::vector<Vec3> grad(verts.size());

    // Contribution of the ordered pair (s, t): d points from s's centroid to
    // t's centroid and only s's normal enters the kernel.
    auto accumulate = [&](std::size_t s, std::size_t t, const Vec3& d, double r2) {
        const TriangleData& S = data[s];
        const TriangleData& T = data[t];
        const double u = dot(S.unit_normal, d);
        const double au = std::abs(u);
        const double inv_rb = inv_r_to_beta(r2, beta);
        const double base = S.area * T.area * inv_rb;
        const double energy = abs_u_to_alpha(au, alpha) * base;
        // d|u|^alpha/du = alpha * u * |u|^(alpha-2); alpha >= 2 keeps this finite at u = 0.
        const double du_factor = alpha == 2.0
                                     ? 2.0 * u
                                     : (au > 0.0 ? alpha * u * std::pow(au, alpha - 2.0) : 0.0);

        // chain through d = c_t - c_s
        const Vec3 grad_d = (base * du_factor) * S.unit_normal - (beta * energy / r2) * d;
        const auto& fs = faces[s];
        const auto& ft = faces[t];
        for (int k = 0; k < 3; ++k) {
            grad[fs[k]] -= grad_d / 3.0;
            grad[ft[k]] += grad_d / 3.0;
        }

        // chain through s's unit normal: project onto the tangent of the sphere
        const Vec3 gn = (base * du_factor) * d;
        const Vec3 gn_tangent =
            (gn - dot(S.unit_normal, gn) * S.unit_normal) / (2.0 * S.area);
        // chain through both areas
        const double per_area_s = energy / S.area;
        const double per_area_t = energy / T.area;
        for (int k = 0; k < 3; ++k) {
            const Vec3 w_s = verts[fs[(k + 1) % 3]] - verts[fs[(k + 2) % 3]];
            grad[fs[k]] += cross(w_s, gn_tangent);
            grad[fs[k]] += (0.5 * per_area_s) * cross(w_s, S.unit_normal);
            const Vec3 w_t = verts[ft[(k + 1) % 3]] - verts[ft[(k + 2) % 3]];
            grad[ft[k]] += (0.5 * per_area_t) * cross(w_t, T.unit_normal);
        }
    };

    for (std::size_t i = 0; i < faces.size(); ++i) {
        for (std::size_t j = i + 1; j < faces.size(); ++j) {
            if (faces_adjacent(faces[i], faces[j])) continue;
            const Vec3 d = data[j].centroid - data[i].centroid;
            const double r2 = norm2(d);
            if (r2 > cutoff2) continue;
            if (r2 < singular2)
                throw SingularConfigurationError(
                    "coincident centroids of non-adjacent triangles " + std::to_string(i) +
                    " and " + std::to_string(j));
            accumulate(i, j, d, r2);
            accumulate(j, i, -d, r2);
        }
    }
    return grad;
}

void GrowthConfig::validate() const {
    if (!(beta > alpha + 2.0))
        throw std::invalid_argument("energy exponents must satisfy beta > alpha + 2");
    if (alpha < 2.0)
        throw std::invalid_argument("alpha below 2 makes the gradient singular at grazing pairs");
    if (target_area_multiplier < 1.0)
        throw std::invalid_argument("target area multiplier must be at least 1");
    if (inflation_step_length < 0.0 || descent_step_length < 0.0)
        throw std::invalid_argument("step lengths must be nonnegative");
    if (max_iterations < 1) throw std::invalid_argument("max iterations must be positive");
    if (fairing_weight < 0.0 || contact_floor_factor < 0.0)
        throw std::invalid_argument("fairing weight and contact floor must be nonnegative");
    if (environment_margin < 0.0 || environment_penalty_weight < 0.0)
        throw std::invalid_argument("environment margin and weight must be nonnegative");
    if (snapshot_fractions.empty())
        throw std::invalid_argument("snapshot fractions must be nonempty");
    for (std::size_t i = 0; i < snapshot_fractions.size(); ++i) {
        const double f = snapshot_fractions[i];
        if (f < 0.0 || f > 1.0) throw std::invalid_argument("snapshot fractions must lie in [0,1]");
        if (i > 0 && f < snapshot_fractions[i - 1])
            throw std::invalid_argument("snapshot fractions must be sorted");
    }
}

namespace {

/// Sorted 1-ring vertex ids (self included) per vertex.
std::vector<std::vector<std::int32_t>> vertex_rings(const TriangleMesh& mesh) {
    std::vector<std::vector<std::int32_t>> ring(mesh.vertices().size());
    for (const auto& f : mesh.faces())
        for (int k = 0; k < 3; ++k) {
            ring[f[k]].push_back(f[(k + 1) % 3]);
            ring[f[k]].push_back(f[(k + 2) % 3]);
        }
    for (std::size_t v = 0; v < ring.size(); ++v) {
        ring[v].push_back(static_cast<std::int32_t>(v));
        std::sort(ring[v].begin(), ring[v].end());
        ring[v].erase(std::unique(ring[v].begin(), ring[v].end()), ring[v].end());
    }
    return ring;
}

struct GapHit {
    std::int32_t vertex;
    std::int32_t triangle;
    double distance;
};

/// (vertex, triangle) pairs closer than `radius` where the triangle is at
/// least two rings away from the vertex. Crease-adjacent geometry is excluded
/// through the 1-ring sets; genuinely approaching sheets are many rings apart.
std::vector<GapHit> gap_hits(const TriangleMesh& mesh, const AabbTree& tree,
                             const std::vector<std::vector<std::int32_t>>& ring, double radius) {
    const auto& verts = mesh.vertices();
    const auto& faces = mesh.faces();
    const Vec3 pad{radius, radius, radius};
    std::vector<GapHit> hits;
    for (std::size_t v = 0; v < verts.size(); ++v) {
        const auto& excluded_ids = ring[v];
        for (std::int32_t t : tree.query_box(verts[v] - pad, verts[v] + pad)) {
            const auto& f = faces[t];
            bool excluded = false;
            for (int k = 0; k < 3 && !excluded; ++k)
                excluded = std::binary_search(excluded_ids.begin(), excluded_ids.end(), f[k]);
            if (excluded) continue;
            const double d =
                point_triangle_distance(verts[v], verts[f[0]], verts[f[1]], verts[f[2]]);
            if (d < radius) hits.push_back({static_cast<std::int32_t>(v), t, d});
        }
    }
    return hits;
}

/// Recomputes edge count and chi from scratch; used to certify accepted steps.
bool counts_unchanged(const TriangleMesh& mesh, std::int64_t v0, std::int64_t e0,
                      std::int64_t f0, std::int64_t chi0) {
    std::unordered_set<std::uint64_t> edges;
    edges.reserve(mesh.faces().size() * 3);
    for (const auto& f : mesh.faces()) {
        for (int k = 0; k < 3; ++k) {
            const std::uint32_t a = static_cast<std::uint32_t>(f[k]);
            const std::uint32_t b = static_cast<std::uint32_t>(f[(k + 1) % 3]);
            edges.insert((static_cast<std::uint64_t>(std::min(a, b)) << 32) | std::max(a, b));
        }
    }
    const auto e = static_cast<std::int64_t>(edges.size());
    const std::int64_t chi = mesh.vertex_count() - e + mesh.face_count();
    return mesh.vertex_count() == v0 && e == e0 && mesh.face_count() == f0 && chi == chi0;
}

double area_of(const TriangleMesh& base, const std::vector<Vec3>& positions) {
    double sum = 0.0;
    for (const auto& f : base.faces())
        sum += 0.5 * norm(cross(positions[f[1]] - positions[f[0]],
                                positions[f[2]] - positions[f[0]]));
    return sum;
}

}  // namespace

GrowthResult grow(const TriangleMesh& placed_seed, const Environment& env,
                  const GrowthConfig& config, std::uint64_t rng_seed,
                  const std::function<void(const GrowthTraceRow&)>& on_trace) {
    (void)rng_seed;  // the flow is fully deterministic; kept for interface stability
    config.validate();

    GrowthResult result;
    const double area0 = surface_area(placed_seed);
    const std::int64_t chi0 = euler_characteristic(placed_seed);
    const std::int64_t v0 = placed_seed.vertex_count();
    const std::int64_t e0 = placed_seed.edge_count();
    const std::int64_t f0 = placed_seed.face_count();
    const double target = config.target_area_multiplier;

    std::vector<double> thresholds;
    thresholds.reserve(config.snapshot_fractions.size());
    for (double f : config.snapshot_fractions) thresholds.push_back(1.0 + f * (target - 1.0));

    auto emit = [&](const TriangleMesh& mesh, int level, double ratio, int iteration) {
        result.snapshots.push_back({mesh, level, ratio, iteration, chi0});
    };

    emit(placed_seed, 0, 1.0, 0);
    result.final_area_ratio = 1.0;
    if (target <= 1.0 + 1e-12) return result;  // nothing to grow

    std::size_t next_level = 1;
    TriangleMesh mesh = placed_seed;
    const bool pure_descent = config.inflation_step_length == 0.0 && env.boxes.empty();
    const auto rings = vertex_rings(mesh);  // connectivity never changes
    // Pinned to the initial edge scale: a floor that grew with the stretching
    // mesh would climb above previously accepted gaps and wedge the flow.
    const double floor_dist = config.contact_floor_factor * mean_edge_length(placed_seed);

    // Normal inflation presses opposite tunnel walls toward each other; when a
    // whole iteration is rejected, the next one runs repulsion-only to reopen
    // the gap instead of wedging against the acceptance test.
    bool recovery = false;
    int consecutive_skips = 0;
    int last_progress_iteration = 0;
    double last_progress_ratio = 1.0;

    for (int iteration = 1; iteration <= config.max_iterations; ++iteration) {
        const double mean_edge = mean_edge_length(mesh);
        const double cutoff = config.cutoff_factor > 0.0
                                  ? config.cutoff_factor * mean_edge
                                  : std::numeric_limits<double>::infinity();
        const double energy0 = tangent_point_energy(mesh, config.alpha, config.beta, cutoff);
        std::vector<Vec3> grad =
            tangent_point_gradient(mesh, config.alpha, config.beta, cutoff);

        // Only obstacle boxes near the mesh can matter this iteration.
        const double reach = config.environment_margin +
                             (config.inflation_step_length + 2.0 * config.descent_step_length) *
                                 mean_edge * config.environment_penalty_weight +
                             config.environment_penalty_weight * config.environment_margin;
        Environment near_env;
        near_env.cube_side = env.cube_side;
        if (!env.boxes.empty()) {
            const Vec3 lo = mesh.bbox_min() - Vec3{reach, reach, reach};
            const Vec3 hi = mesh.bbox_max() + Vec3{reach, reach, reach};
            for (const Box& b : env.boxes)
                if (b.max.x >= lo.x && b.min.x <= hi.x && b.max.y >= lo.y && b.min.y <= hi.y &&
                    b.max.z >= lo.z && b.min.z <= hi.z)
                    near_env.boxes.push_back(b);
        }

        if (config.smooth_gradient) {
            // One Jacobi sweep over the face graph.
            std::vector<Vec3> acc(grad.size());
            std::vector<int> deg(grad.size(), 0);
            for (const auto& f : mesh.faces())
                for (int k = 0; k < 3; ++k) {
                    acc[f[k]] += grad[f[(k + 1) % 3]] + grad[f[(k + 2) % 3]];
                    deg[f[k]] += 2;
                }
            for (std::size_t i = 0; i < grad.size(); ++i)
                if (deg[i] > 0) grad[i] = 0.5 * grad[i] + 0.5 * (acc[i] / deg[i]);
        }

        const auto& positions = mesh.vertices();

        // Repulsive descent: per-vertex clamped gradient direction (a global
        // max-norm scale starves every contact except the single worst one),
        // then a backtracking line search on the energy.
        const double descent_cap = config.descent_step_length * mean_edge * (recovery ? 2.0 : 1.0);
        std::vector<Vec3> descent(positions.size());
        for (std::size_t i = 0; i < positions.size(); ++i) {
            const double g = norm(grad[i]);
            descent[i] = g > 0.0 ? (-std::min(1.0, descent_cap / g)) * grad[i] : Vec3{};
        }
        double step = 1.0;
        bool decreased = false;
        std::vector<Vec3> trial(positions.size());
        for (int k = 0; k < 7 && !decreased; ++k) {
            for (std::size_t i = 0; i < positions.size(); ++i)
                trial[i] = positions[i] + step * descent[i];
            const TriangleMesh trial_mesh = mesh.with_positions(trial);
            if (tangent_point_energy(trial_mesh, config.alpha, config.beta, cutoff) <= energy0)
                decreased = true;
            else
                step *= 0.5;
        }
        if (!decreased) step = 0.0;

        const std::vector<Vec3> normals = vertex_normals(mesh);
        const double inflation = recovery ? 0.0 : config.inflation_step_length * mean_edge;

        // Near contacts: inflation fades out (zero at the floor, full at
        // twice the floor) and a separation spring pushes the pair apart.
        // The spring matters where the pair kernel is blind - edge-on
        // approaches have |n.d| ~ 0 and produce almost no repulsion.
        std::vector<double> damp(positions.size(), 1.0);
        std::vector<Vec3> separation(positions.size());
        if (floor_dist > 0.0) {
            const AabbTree current_tree(mesh);
            for (const GapHit& hit : gap_hits(mesh, current_tree, rings, 2.0 * floor_dist)) {
                damp[hit.vertex] = std::min(
                    damp[hit.vertex], std::clamp(hit.distance / floor_dist - 1.0, 0.0, 1.0));
                const auto& f = mesh.faces()[hit.triangle];
                const Vec3 cp = closest_point_on_triangle(positions[hit.vertex], positions[f[0]],
                                                          positions[f[1]], positions[f[2]]);
                const Vec3 away = positions[hit.vertex] - cp;
                const double d = norm(away);
                if (d <= 0.0) continue;  // actual contact is the predicates' business
                const double push = 0.5 * (2.0 * floor_dist - hit.distance);
                separation[hit.vertex] += (push / d) * away;
                for (int k = 0; k < 3; ++k)
                    separation[f[k]] -= (push / (3.0 * d)) * away;
            }
        }

        // Tangential fairing: pull each vertex toward its neighborhood
        // centroid within the tangent plane. Off in recovery, which must only
        // open contacts.
        std::vector<Vec3> fairing(positions.size());
        if (!pure_descent && !recovery && config.fairing_weight > 0.0) {
            std::vector<Vec3> centroid_sum(positions.size());
            std::vector<int> degree(positions.size(), 0);
            for (const auto& f : mesh.faces())
                for (int k = 0; k < 3; ++k) {
                    centroid_sum[f[k]] += positions[f[(k + 1) % 3]] + positions[f[(k + 2) % 3]];
                    degree[f[k]] += 2;
                }
            for (std::size_t i = 0; i < positions.size(); ++i) {
                if (degree[i] == 0) continue;
                const Vec3 pull = centroid_sum[i] / degree[i] - positions[i];
                const Vec3 tangential = pull - dot(pull, normals[i]) * normals[i];
                fairing[i] = config.fairing_weight * tangential;
            }
        }

        std::vector<Vec3> displacement(positions.size());
        for (std::size_t i = 0; i < positions.size(); ++i) {
            Vec3 d = damp[i] * inflation * normals[i] + step * descent[i] + fairing[i] +
                     separation[i];
            if (!recovery && !near_env.boxes.empty()) {
                const double dist = near_env.distance(positions[i]);
                if (dist < config.environment_margin)
                    d += config.environment_penalty_weight *
                         (config.environment_margin - dist) *
                         near_env.distance_gradient(positions[i]);
            }
            displacement[i] = d;
        }

        // Never overshoot the target ratio by more than a sliver: shrink the
        // whole displacement so the step lands just past the last threshold.
        {
            for (std::size_t i = 0; i < positions.size(); ++i)
                trial[i] = positions[i] + displacement[i];
            const double full_ratio = area_of(mesh, trial) / area0;
            if (full_ratio > target) {
                double lo = 0.0, hi = 1.0;
                for (int it = 0; it < 30; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    for (std::size_t i = 0; i < positions.size(); ++i)
                        trial[i] = positions[i] + mid * displacement[i];
                    (area_of(mesh, trial) / area0 < target * 1.0002 ? lo : hi) = mid;
                }
                for (Vec3& d : displacement) d *= lo;
            }
        }

        // Acceptance with local freezing: a violation pins the offending
        // vertices (and their rings) at their current positions and the step
        // is retried, so one jammed contact cannot veto growth everywhere
        // else. Only when freezing stops converging is the whole step halved.
        bool accepted = false;
        double ratio_after = result.final_area_ratio;
        const bool debug = std::getenv("TOPOGROW_GROW_DEBUG") != nullptr;
        for (double scale = 1.0; scale >= 1.0 / 64.0 && !accepted; scale *= 0.5) {
            std::vector<char> frozen(positions.size(), 0);
            for (int round = 0; round < 6; ++round) {
                for (std::size_t i = 0; i < positions.size(); ++i)
                    trial[i] = frozen[i] ? positions[i] : positions[i] + scale * displacement[i];
                TriangleMesh candidate = mesh.with_positions(trial);
                const AabbTree tree(candidate);

                std::vector<std::int32_t> violators;
                for (const auto& [fa, fb] : tree.all_self_intersections()) {
                    for (int k = 0; k < 3; ++k) {
                        violators.push_back(candidate.faces()[fa][k]);
                        violators.push_back(candidate.faces()[fb][k]);
                    }
                }
                if (floor_dist > 0.0) {
                    for (const GapHit& hit : gap_hits(candidate, tree, rings, floor_dist)) {
                        violators.push_back(hit.vertex);
                        for (int k = 0; k < 3; ++k)
                            violators.push_back(candidate.faces()[hit.triangle][k]);
                    }
                }
                if (!near_env.boxes.empty()) {
                    for (std::size_t i = 0; i < trial.size(); ++i)
                        if (near_env.distance(trial[i]) < 0.0)
                            violators.push_back(static_cast<std::int32_t>(i));
                }

                if (violators.empty()) {
                    if (pure_descent &&
                        tangent_point_energy(candidate, config.alpha, config.beta, cutoff) >
                            energy0 * (1.0 + 1e-12))
                        break;  // freezing cannot fix the energy; halve instead
                    mesh = std::move(candidate);
                    accepted = true;
                    break;
                }
                if (debug)
                    std::fprintf(stderr, "  iter %d scale %.4f round %d: %zu violating vertices\n",
                                 iteration, scale, round, violators.size());

                bool grew = false;
                for (std::int32_t v : violators)
                    for (std::int32_t u : rings[v])
                        if (!frozen[u]) {
                            frozen[u] = 1;
                            grew = true;
                        }
                if (!grew) break;  // nothing new to pin; halve the step
            }
        }

        recovery = !accepted && !recovery;
        consecutive_skips = accepted ? 0 : consecutive_skips + 1;
        if (consecutive_skips >= 50)
            throw GrowthStalledError(
                "growth wedged: 50 consecutive iterations rejected at area ratio " +
                std::to_string(result.final_area_ratio));
        if (result.final_area_ratio > last_progress_ratio + 1e-5) {
            last_progress_ratio = result.final_area_ratio;
            last_progress_iteration = iteration;
        } else if (iteration - last_progress_iteration >= 150) {
            throw GrowthStalledError("growth made no area progress for 150 iterations at ratio " +
                                     std::to_string(result.final_area_ratio));
        }

        if (accepted) {
            ++result.accepted_steps;
            ratio_after = surface_area(mesh) / area0;
            result.final_area_ratio = ratio_after;
            if (!counts_unchanged(mesh, v0, e0, f0, chi0) || has_self_intersection(mesh))
                ++result.topology_violations;
            result.trace.push_back({iteration, energy0, ratio_after, true});
            if (on_trace) on_trace(result.trace.back());
            while (next_level < thresholds.size() &&
                   ratio_after + 1e-12 >= thresholds[next_level]) {
                emit(mesh, static_cast<int>(next_level), ratio_after, iteration);
                ++next_level;
            }
            if (next_level == thresholds.size()) return result;
        } else {
            ++result.rejected_steps;
            result.trace.push_back({iteration, energy0, ratio_after, false});
            if (on_trace) on_trace(result.trace.back());
        }
    }

    throw GrowthStalledError("growth stalled at area ratio " +
                             std::to_string(result.final_area_ratio) + " with " +
                             std::to_string(result.snapshots.size()) + "/" +
                             std::to_string(thresholds.size()) + " snapshots after " +
                             std::to_string(config.max_iterations) + " iterations");
}

TriangleMesh cellular_displacement(const TriangleMesh& mesh, double intensity,
                                   double feature_size, std::uint64_t rng_seed) {
    if (intensity < 0.0) throw std::invalid_argument("intensity must be nonnegative");
    if (feature_size <= 0.0) throw std::invalid_argument("feature size must be positive");
    if (intensity == 0.0) return mesh;

    const CellularNoise3 noise(rng_seed);
    const std::vector<Vec3> normals = vertex_normals(mesh);
    const auto& positions = mesh.vertices();

    std::vector<double> offsets(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i)
        offsets[i] = noise.value01(positions[i] / feature_size) - 0.5;

    for (int attempt = 0; attempt <= 8; ++attempt) {
        const double k = intensity * std::pow(0.5, attempt);
        std::vector<Vec3> displaced(positions.size());
        for (std::size_t i = 0; i < positions.size(); ++i)
            displaced[i] = positions[i] + (k * offsets[i]) * normals[i];
        TriangleMesh candidate = mesh.with_positions(std::move(displaced));
        if (!has_self_intersection(candidate)) return candidate;
    }
    throw DisplacementError("displacement self-intersects even at minimum intensity");
}

}  // namespace topogrow
