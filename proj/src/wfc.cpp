#include "topogrow/wfc.hpp"

#include <fstream>
#include <limits>
#include <stdexcept>

#include "topogrow/errors.hpp"
#include "topogrow/rng.hpp"

namespace topogrow {

void TileSet::resize_rules() {
    for (auto& a : allowed) a.assign(tiles.size() * tiles.size(), 0);
    tile_boxes.resize(tiles.size());
}

void TileSet::add_symmetric_rule(int a, int b, int axis) {
    set_rule(a, b, 2 * axis);
    set_rule(b, a, 2 * axis + 1);
}

void TileSet::validate() const {
    if (tiles.empty()) throw std::invalid_argument("tile set is empty");
    const int n = static_cast<int>(tiles.size());
    for (int dir = 0; dir < 6; ++dir)
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                if (rule(a, b, dir) != rule(b, a, opposite(dir)))
                    throw std::invalid_argument(
                        "adjacency rules are not direction-consistent for tiles '" + tiles[a] +
                        "' and '" + tiles[b] + "'");
}

namespace {

int direction_from_string(const std::string& s) {
    if (s == "+x") return PosX;
    if (s == "-x") return NegX;
    if (s == "+y") return PosY;
    if (s == "-y") return NegY;
    if (s == "+z") return PosZ;
    if (s == "-z") return NegZ;
    throw std::invalid_argument("unknown direction '" + s + "'");
}

int axis_from_string(const std::string& s) {
    if (s == "x") return 0;
    if (s == "y") return 1;
    if (s == "z") return 2;
    throw std::invalid_argument("unknown axis '" + s + "'");
}

}  // namespace

TileSet TileSet::from_json(const nlohmann::json& doc) {
    TileSet ts;
    std::vector<std::vector<Box>> boxes;
    for (const auto& tile : doc.at("tiles")) {
        if (tile.is_string()) {
            ts.tiles.push_back(tile.get<std::string>());
            boxes.emplace_back();
        } else {
            ts.tiles.push_back(tile.at("name").get<std::string>());
            std::vector<Box> tb;
            if (tile.contains("boxes")) {
                for (const auto& b : tile.at("boxes")) {
                    Box box{{b.at(0).at(0).get<double>(), b.at(0).at(1).get<double>(),
                             b.at(0).at(2).get<double>()},
                            {b.at(1).at(0).get<double>(), b.at(1).at(1).get<double>(),
                             b.at(1).at(2).get<double>()}};
                    tb.push_back(box);
                }
            }
            boxes.push_back(std::move(tb));
        }
    }
    ts.resize_rules();
    ts.tile_boxes = std::move(boxes);
    ts.tile_boxes.resize(ts.tiles.size());

    auto tile_index = [&](const std::string& name) {
        for (std::size_t i = 0; i < ts.tiles.size(); ++i)
            if (ts.tiles[i] == name) return static_cast<int>(i);
        throw std::invalid_argument("rule references unknown tile '" + name + "'");
    };

    for (const auto& rule : doc.at("rules")) {
        const int a = tile_index(rule.at("from").get<std::string>());
        const int b = tile_index(rule.at("to").get<std::string>());
        if (rule.contains("axis")) {
            ts.add_symmetric_rule(a, b, axis_from_string(rule.at("axis").get<std::string>()));
        } else {
            ts.set_rule(a, b, direction_from_string(rule.at("dir").get<std::string>()));
        }
    }
    ts.validate();
    return ts;
}

TileSet TileSet::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open tile set: " + path);
    nlohmann::json doc;
    in >> doc;
    return from_json(doc);
}

namespace {

struct Wave {
    GridDims dims;
    int n_tiles;
    std::vector<std::uint8_t> candidates;  // cell * n_tiles + tile
    std::vector<int> counts;
    std::vector<bool> collapsed;

    Wave(const GridDims& d, int t)
        : dims(d),
          n_tiles(t),
          candidates(static_cast<std::size_t>(d.cell_count()) * t, 1),
          counts(d.cell_count(), t),
          collapsed(d.cell_count(), false) {}

    bool has(std::int64_t cell, int tile) const {
        return candidates[cell * n_tiles + tile] != 0;
    }
    void remove(std::int64_t cell, int tile) {
        auto& c = candidates[cell * n_tiles + tile];
        if (c) {
            c = 0;
            --counts[cell];
        }
    }
    std::int64_t index(int x, int y, int z) const {
        return (static_cast<std::int64_t>(z) * dims.ny + y) * dims.nx + x;
    }
};

const int kStep[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};

/// Removes neighbor candidates unsupported by `cell`, to fixpoint.
/// Returns false on contradiction (some cell with zero candidates).
bool propagate(Wave& wave, const TileSet& tiles, std::vector<std::int64_t>& queue) {
    while (!queue.empty()) {
        const std::int64_t cell = queue.back();
        queue.pop_back();
        const int cx = static_cast<int>(cell % wave.dims.nx);
        const int cy = static_cast<int>((cell / wave.dims.nx) % wave.dims.ny);
        const int cz = static_cast<int>(cell / (static_cast<std::int64_t>(wave.dims.nx) * wave.dims.ny));
        for (int dir = 0; dir < 6; ++dir) {
            const int nx = cx + kStep[dir][0], ny = cy + kStep[dir][1], nz = cz + kStep[dir][2];
            if (nx < 0 || ny < 0 || nz < 0 || nx >= wave.dims.nx || ny >= wave.dims.ny ||
                nz >= wave.dims.nz)
                continue;
            const std::int64_t neighbor = wave.index(nx, ny, nz);
            bool changed = false;
            for (int t = 0; t < wave.n_tiles; ++t) {
                if (!wave.has(neighbor, t)) continue;
                bool supported = false;
                for (int s = 0; s < wave.n_tiles && !supported; ++s)
                    supported = wave.has(cell, s) && tiles.rule(s, t, dir);
                if (!supported) {
                    wave.remove(neighbor, t);
                    changed = true;
                }
            }
            if (wave.counts[neighbor] == 0) return false;
            if (changed) queue.push_back(neighbor);
        }
    }
    return true;
}

bool attempt(const GridDims& dims, const TileSet& tiles, Rng& rng, std::vector<int>& out) {
    const int n_tiles = static_cast<int>(tiles.tiles.size());
    Wave wave(dims, n_tiles);
    const std::int64_t total = dims.cell_count();
    std::vector<std::int64_t> queue;
    std::vector<std::int64_t> lowest;

    for (std::int64_t done = 0; done < total; ++done) {
        // Lowest entropy = fewest remaining candidate tiles, random tie-break.
        int best = std::numeric_limits<int>::max();
        lowest.clear();
        for (std::int64_t c = 0; c < total; ++c) {
            if (wave.collapsed[c]) continue;
            if (wave.counts[c] < best) {
                best = wave.counts[c];
                lowest.clear();
            }
            if (wave.counts[c] == best) lowest.push_back(c);
        }
        const std::int64_t cell = lowest[rng.next_below(lowest.size())];

        int pick = static_cast<int>(rng.next_below(wave.counts[cell]));
        int chosen = -1;
        for (int t = 0; t < n_tiles; ++t) {
            if (wave.has(cell, t) && pick-- == 0) {
                chosen = t;
                break;
            }
        }
        for (int t = 0; t < n_tiles; ++t)
            if (t != chosen) wave.remove(cell, t);
        wave.collapsed[cell] = true;

        queue.assign(1, cell);
        if (!propagate(wave, tiles, queue)) return false;
    }

    out.resize(total);
    for (std::int64_t c = 0; c < total; ++c) {
        for (int t = 0; t < n_tiles; ++t)
            if (wave.has(c, t)) {
                out[c] = t;
                break;
            }
    }
    return true;
}

}  // namespace

std::vector<int> wfc_collapse(const GridDims& dims, const TileSet& tiles,
                              std::uint64_t rng_seed, int max_restarts) {
    tiles.validate();
    if (dims.nx < 1 || dims.ny < 1 || dims.nz < 1)
        throw std::invalid_argument("grid dimensions must be positive");
    std::vector<int> out;
    for (int restart = 0; restart <= max_restarts; ++restart) {
        Rng rng(hash_mix({rng_seed, static_cast<std::uint64_t>(restart)}));
        if (attempt(dims, tiles, rng, out)) return out;
    }
    throw UnsatisfiableError("wave function collapse failed after " +
                             std::to_string(max_restarts) + " restarts");
}

std::int64_t count_adjacency_violations(const GridDims& dims, const std::vector<int>& cells,
                                        const TileSet& tiles) {
    std::int64_t violations = 0;
    auto index = [&](int x, int y, int z) {
        return (static_cast<std::int64_t>(z) * dims.ny + y) * dims.nx + x;
    };
    for (int z = 0; z < dims.nz; ++z)
        for (int y = 0; y < dims.ny; ++y)
            for (int x = 0; x < dims.nx; ++x) {
                const int a = cells[index(x, y, z)];
                if (x + 1 < dims.nx && !tiles.rule(a, cells[index(x + 1, y, z)], PosX)) ++violations;
                if (y + 1 < dims.ny && !tiles.rule(a, cells[index(x, y + 1, z)], PosY)) ++violations;
                if (z + 1 < dims.nz && !tiles.rule(a, cells[index(x, y, z + 1)], PosZ)) ++violations;
            }
    return violations;
}

Environment wfc_environment(const GridDims& dims, const TileSet& tiles, double cell_size,
                            std::uint64_t rng_seed, int max_restarts) {
    if (cell_size <= 0.0) throw std::invalid_argument("cell size must be positive");
    const std::vector<int> cells = wfc_collapse(dims, tiles, rng_seed, max_restarts);

    Environment env;
    const int max_dim = std::max(dims.nx, std::max(dims.ny, dims.nz));
    env.cube_side = max_dim * cell_size;
    env.provenance = "wfc(seed=" + std::to_string(rng_seed) + ")";

    const Vec3 grid_origin{-0.5 * dims.nx * cell_size, -0.5 * dims.ny * cell_size,
                           -0.5 * dims.nz * cell_size};
    std::int64_t i = 0;
    for (int z = 0; z < dims.nz; ++z)
        for (int y = 0; y < dims.ny; ++y)
            for (int x = 0; x < dims.nx; ++x, ++i) {
                const Vec3 cell_min = grid_origin + Vec3{x * cell_size, y * cell_size, z * cell_size};
                for (const Box& b : tiles.tile_boxes[cells[i]]) {
                    env.boxes.push_back({cell_min + cell_size * b.min, cell_min + cell_size * b.max});
                }
            }
    return env;
}

}  // namespace topogrow
