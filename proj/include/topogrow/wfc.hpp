#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "topogrow/envgen.hpp"

namespace topogrow {

/// Axis directions, paired so that opposite(d) = d ^ 1.
enum Direction : int { PosX = 0, NegX = 1, PosY = 2, NegY = 3, PosZ = 4, NegZ = 5 };
inline int opposite(int dir) { return dir ^ 1; }

struct TileSet {
    std::vector<std::string> tiles;
    /// Per-tile obstacle boxes in cell-local [0,1]^3 coordinates (may be empty).
    std::vector<std::vector<Box>> tile_boxes;
    /// allowed[dir][a * tiles.size() + b]: tile b may sit in direction `dir` of tile a.
    std::array<std::vector<std::uint8_t>, 6> allowed;

    bool rule(int a, int b, int dir) const {
        return allowed[dir][static_cast<std::size_t>(a) * tiles.size() + b] != 0;
    }
    void set_rule(int a, int b, int dir, bool value = true) {
        allowed[dir][static_cast<std::size_t>(a) * tiles.size() + b] = value ? 1 : 0;
    }
    /// Installs rule(a,b,+axis) together with its mirror rule(b,a,-axis).
    void add_symmetric_rule(int a, int b, int axis);

    void resize_rules();
    /// Throws std::invalid_argument when rule(a,b,d) != rule(b,a,opposite(d)).
    void validate() const;

    static TileSet from_json(const nlohmann::json& doc);
    static TileSet load(const std::string& path);
};

struct GridDims {
    int nx = 1, ny = 1, nz = 1;
    std::int64_t cell_count() const {
        return static_cast<std::int64_t>(nx) * ny * nz;
    }
};

/// Tile-based wave function collapse: repeatedly collapse the uncollapsed cell
/// with the fewest remaining candidates (uniform random tie-break), then
/// propagate constraints to fixpoint. Contradictions restart with a fresh RNG
/// substream; throws UnsatisfiableError once max_restarts restarts are spent.
/// Returns one tile index per cell, x-fastest order.
std::vector<int> wfc_collapse(const GridDims& dims, const TileSet& tiles,
                              std::uint64_t rng_seed, int max_restarts = 32);

/// Number of adjacent cell pairs violating the tile adjacency rules.
std::int64_t count_adjacency_violations(const GridDims& dims, const std::vector<int>& cells,
                                        const TileSet& tiles);

/// Collapse a tile grid and instantiate each tile's boxes inside its cell.
/// The bounding cube side is max(dims) * cell_size, centered at the origin.
Environment wfc_environment(const GridDims& dims, const TileSet& tiles, double cell_size,
                            std::uint64_t rng_seed, int max_restarts = 32);

}  // namespace topogrow
