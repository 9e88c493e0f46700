#pragma once

#include <cstdint>

#include <json.hpp>

#include "topogrow/rasterize.hpp"

namespace topogrow {

struct BettiTriple {
    std::int64_t beta0 = 0;
    std::int64_t beta1 = 0;
    std::int64_t beta2 = 0;
    std::int64_t chi = 0;

    friend bool operator==(const BettiTriple& a, const BettiTriple& b) {
        return a.beta0 == b.beta0 && a.beta1 == b.beta1 && a.beta2 == b.beta2 && a.chi == b.chi;
    }
};

/// Cell counts of the union of closed unit cubes at occupied voxels
/// (shared cells counted once).
struct CubicalComplexCounts {
    std::int64_t vertices = 0;
    std::int64_t edges = 0;
    std::int64_t squares = 0;
    std::int64_t cubes = 0;
    std::int64_t euler() const { return vertices - edges + squares - cubes; }
};

CubicalComplexCounts cubical_counts(const VoxelGrid& grid);

/// Betti numbers of the solid in the closed-cube model: beta0 = foreground
/// components under the cube adjacency (26), beta2 = bounded background
/// components under the complementary 6-adjacency, chi from the cubical
/// complex, beta1 = beta0 + beta2 - chi.
BettiTriple betti_voxel(const VoxelGrid& grid);

/// Betti numbers from GF(2) boundary-matrix reduction over the cubical
/// complex, independent of the counting path. Refuses grids above 16 per axis.
BettiTriple homology_oracle(const VoxelGrid& grid);

struct VerificationReport {
    BettiTriple expected;
    BettiTriple actual;
    bool pass_beta0 = false;
    bool pass_beta1 = false;
    bool pass_beta2 = false;
    bool pass() const { return pass_beta0 && pass_beta1 && pass_beta2; }

    nlohmann::json to_json() const;
    static VerificationReport from_json(const nlohmann::json& doc);
};

/// Expected solid-body Betti numbers are (1, genus, 0). Never throws on a
/// mismatch; the outcome is recorded, not enforced.
VerificationReport verify_sample(const VoxelGrid& grid, int expected_genus);

}  // namespace topogrow
