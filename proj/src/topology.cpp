#include "topogrow/topology.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "topogrow/errors.hpp"

namespace topogrow {

namespace {

struct GridView {
    const VoxelGrid* grid;
    bool at(int x, int y, int z) const {
        return grid->in_range(x, y, z) && grid->occupancy[grid->index(x, y, z)] != 0;
    }
};

}  // namespace

CubicalComplexCounts cubical_counts(const VoxelGrid& grid) {
    const GridView g{&grid};
    const int r = grid.resolution;
    CubicalComplexCounts counts;

    // Lattice entities exist iff any incident voxel is occupied; iterating the
    // (r+1)^3 lattice counts each shared cell exactly once.
    for (int z = 0; z <= r; ++z) {
        for (int y = 0; y <= r; ++y) {
            for (int x = 0; x <= r; ++x) {
                // vertex at lattice point (x, y, z): 8 incident voxels
                bool vertex = false;
                for (int dz = -1; dz <= 0 && !vertex; ++dz)
                    for (int dy = -1; dy <= 0 && !vertex; ++dy)
                        for (int dx = -1; dx <= 0 && !vertex; ++dx)
                            vertex = g.at(x + dx, y + dy, z + dz);
                if (vertex) ++counts.vertices;

                // edges along +x/+y/+z from this lattice point: 4 incident voxels each
                if (x < r && (g.at(x, y, z) || g.at(x, y - 1, z) || g.at(x, y, z - 1) ||
                              g.at(x, y - 1, z - 1)))
                    ++counts.edges;
                if (y < r && (g.at(x, y, z) || g.at(x - 1, y, z) || g.at(x, y, z - 1) ||
                              g.at(x - 1, y, z - 1)))
                    ++counts.edges;
                if (z < r && (g.at(x, y, z) || g.at(x - 1, y, z) || g.at(x, y - 1, z) ||
                              g.at(x - 1, y - 1, z)))
                    ++counts.edges;

                // squares normal to z/y/x: 2 incident voxels each
                if (x < r && y < r && (g.at(x, y, z) || g.at(x, y, z - 1))) ++counts.squares;
                if (x < r && z < r && (g.at(x, y, z) || g.at(x, y - 1, z))) ++counts.squares;
                if (y < r && z < r && (g.at(x, y, z) || g.at(x - 1, y, z))) ++counts.squares;

                if (x < r && y < r && z < r && g.at(x, y, z)) ++counts.cubes;
            }
        }
    }
    return counts;
}

namespace {

/// Flood fill; neighbors given by offsets. Returns component count of `match`
/// cells within the padded index space [0, n)^3.
template <typename Match>
std::int64_t count_components(int n, const Match& match, bool diagonal) {
    std::vector<std::int8_t> state(static_cast<std::size_t>(n) * n * n, 0);  // 1 = visited
    auto index = [n](int x, int y, int z) {
        return (static_cast<std::size_t>(z) * n + y) * n + x;
    };
    std::int64_t components = 0;
    std::vector<std::array<int, 3>> stack;
    for (int z = 0; z < n; ++z) {
        for (int y = 0; y < n; ++y) {
            for (int x = 0; x < n; ++x) {
                if (state[index(x, y, z)] || !match(x, y, z)) continue;
                ++components;
                state[index(x, y, z)] = 1;
                stack.push_back({x, y, z});
                while (!stack.empty()) {
                    const auto [cx, cy, cz] = stack.back();
                    stack.pop_back();
                    for (int dz = -1; dz <= 1; ++dz)
                        for (int dy = -1; dy <= 1; ++dy)
                            for (int dx = -1; dx <= 1; ++dx) {
                                if (dx == 0 && dy == 0 && dz == 0) continue;
                                if (!diagonal && std::abs(dx) + std::abs(dy) + std::abs(dz) != 1)
                                    continue;
                                const int nx = cx + dx, ny = cy + dy, nz = cz + dz;
                                if (nx < 0 || ny < 0 || nz < 0 || nx >= n || ny >= n || nz >= n)
                                    continue;
                                if (state[index(nx, ny, nz)] || !match(nx, ny, nz)) continue;
                                state[index(nx, ny, nz)] = 1;
                                stack.push_back({nx, ny, nz});
                            }
                }
            }
        }
    }
    return components;
}

}  // namespace

BettiTriple betti_voxel(const VoxelGrid& grid) {
    const int r = grid.resolution;
    const GridView g{&grid};

    BettiTriple b;
    if (grid.occupied_count() == 0) return b;

    // Closed-cube model: cubes touching at a face, edge or corner are one
    // component (26-adjacency); the open complement pairs with 6-adjacency.
    // This is the pairing consistent with chi of the closed cubical complex,
    // and the one the algebraic oracle reproduces.
    b.beta0 = count_components(
        r, [&](int x, int y, int z) { return g.at(x, y, z); }, /*diagonal=*/true);

    // Pad by one empty layer; the background component touching the pad is the
    // unbounded outside, every other one is a cavity.
    const std::int64_t background = count_components(
        r + 2, [&](int x, int y, int z) { return !g.at(x - 1, y - 1, z - 1); },
        /*diagonal=*/false);
    b.beta2 = background - 1;

    b.chi = cubical_counts(grid).euler();
    b.beta1 = b.beta0 + b.beta2 - b.chi;
    return b;
}

namespace {

/// Rank of a GF(2) boundary matrix by left-to-right column reduction.
/// Columns hold sorted row indices.
std::int64_t gf2_rank(std::vector<std::vector<std::int32_t>> columns) {
    std::unordered_map<std::int32_t, std::int32_t> pivot_of_low;
    std::int64_t rank = 0;
    std::vector<std::int32_t> merged;
    for (std::size_t j = 0; j < columns.size(); ++j) {
        auto& col = columns[j];
        while (!col.empty()) {
            const std::int32_t low = col.back();
            const auto it = pivot_of_low.find(low);
            if (it == pivot_of_low.end()) break;
            const auto& other = columns[it->second];
            merged.clear();
            std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(),
                                          std::back_inserter(merged));
            col.swap(merged);
        }
        if (!col.empty()) {
            pivot_of_low.emplace(col.back(), static_cast<std::int32_t>(j));
            ++rank;
        }
    }
    return rank;
}

}  // namespace

BettiTriple homology_oracle(const VoxelGrid& grid) {
    const int r = grid.resolution;
    if (r > 16)
        throw std::invalid_argument("homology oracle is limited to grids of at most 16 per axis");
    const GridView g{&grid};

    BettiTriple b;
    if (grid.occupied_count() == 0) return b;

    // Enumerate cells. Ids are per-dimension, lattice points keyed on an
    // (r+1)-side lattice; edges/squares keyed by anchor point and orientation.
    const int n = r + 1;
    auto pt = [n](int x, int y, int z) {
        return (static_cast<std::int32_t>(z) * n + y) * n + x;
    };
    std::unordered_map<std::int32_t, std::int32_t> vertex_id;
    std::unordered_map<std::int32_t, std::int32_t> edge_id[3];    // anchor -> id, axis
    std::unordered_map<std::int32_t, std::int32_t> square_id[3];  // anchor -> id, normal axis

    auto get_id = [](std::unordered_map<std::int32_t, std::int32_t>& map, std::int32_t key,
                     std::int32_t& counter) {
        const auto [it, inserted] = map.try_emplace(key, counter);
        if (inserted) ++counter;
        return it->second;
    };

    std::int32_t n_vertices = 0, n_edges = 0, n_squares = 0, n_cubes = 0;
    std::vector<std::vector<std::int32_t>> d1, d2, d3;  // boundary columns

    auto vertex = [&](int x, int y, int z) { return get_id(vertex_id, pt(x, y, z), n_vertices); };
    auto edge = [&](int axis, int x, int y, int z) {
        const auto [it, inserted] = edge_id[axis].try_emplace(pt(x, y, z), n_edges);
        if (inserted) {
            ++n_edges;
            const int dx = axis == 0, dy = axis == 1, dz = axis == 2;
            std::vector<std::int32_t> bd{vertex(x, y, z), vertex(x + dx, y + dy, z + dz)};
            std::sort(bd.begin(), bd.end());
            d1.push_back(std::move(bd));
        }
        return it->second;
    };
    auto square = [&](int normal, int x, int y, int z) {
        const auto [it, inserted] = square_id[normal].try_emplace(pt(x, y, z), n_squares);
        if (inserted) {
            ++n_squares;
            const int u = (normal + 1) % 3, v = (normal + 2) % 3;
            int du[3] = {0, 0, 0}, dv[3] = {0, 0, 0};
            du[u] = 1;
            dv[v] = 1;
            std::vector<std::int32_t> bd{
                edge(u, x, y, z),
                edge(u, x + dv[0], y + dv[1], z + dv[2]),
                edge(v, x, y, z),
                edge(v, x + du[0], y + du[1], z + du[2]),
            };
            std::sort(bd.begin(), bd.end());
            d2.push_back(std::move(bd));
        }
        return it->second;
    };

    for (int z = 0; z < r; ++z)
        for (int y = 0; y < r; ++y)
            for (int x = 0; x < r; ++x) {
                if (!g.at(x, y, z)) continue;
                ++n_cubes;
                std::vector<std::int32_t> bd{
                    square(0, x, y, z), square(0, x + 1, y, z),  // normal x
                    square(1, x, y, z), square(1, x, y + 1, z),  // normal y
                    square(2, x, y, z), square(2, x, y, z + 1),  // normal z
                };
                std::sort(bd.begin(), bd.end());
                d3.push_back(std::move(bd));
            }

    const std::int64_t rank1 = gf2_rank(std::move(d1));
    const std::int64_t rank2 = gf2_rank(std::move(d2));
    const std::int64_t rank3 = gf2_rank(std::move(d3));

    b.beta0 = n_vertices - rank1;
    b.beta1 = n_edges - rank1 - rank2;
    b.beta2 = n_squares - rank2 - rank3;
    b.chi = b.beta0 - b.beta1 + b.beta2;
    return b;
}

nlohmann::json VerificationReport::to_json() const {
    return nlohmann::json{
        {"expected", {{"beta0", expected.beta0}, {"beta1", expected.beta1},
                      {"beta2", expected.beta2}, {"chi", expected.chi}}},
        {"actual", {{"beta0", actual.beta0}, {"beta1", actual.beta1},
                    {"beta2", actual.beta2}, {"chi", actual.chi}}},
        {"passBeta0", pass_beta0},
        {"passBeta1", pass_beta1},
        {"passBeta2", pass_beta2},
        {"pass", pass()},
    };
}

VerificationReport VerificationReport::from_json(const nlohmann::json& doc) {
    VerificationReport r;
    const auto& e = doc.at("expected");
    const auto& a = doc.at("actual");
    r.expected = {e.at("beta0").get<std::int64_t>(), e.at("beta1").get<std::int64_t>(),
                  e.at("beta2").get<std::int64_t>(), e.at("chi").get<std::int64_t>()};
    r.actual = {a.at("beta0").get<std::int64_t>(), a.at("beta1").get<std::int64_t>(),
                a.at("beta2").get<std::int64_t>(), a.at("chi").get<std::int64_t>()};
    r.pass_beta0 = doc.at("passBeta0").get<bool>();
    r.pass_beta1 = doc.at("passBeta1").get<bool>();
    r.pass_beta2 = doc.at("passBeta2").get<bool>();
    return r;
}

VerificationReport verify_sample(const VoxelGrid& grid, int expected_genus) {
    VerificationReport report;
    report.expected = {1, expected_genus, 0, 1 - expected_genus};
    report.actual = betti_voxel(grid);
    report.pass_beta0 = report.actual.beta0 == report.expected.beta0;
    report.pass_beta1 = report.actual.beta1 == report.expected.beta1;
    report.pass_beta2 = report.actual.beta2 == report.expected.beta2;
    return report;
}

}  // namespace topogrow
