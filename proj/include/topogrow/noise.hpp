#pragma once

#include <array>
#include <cstdint>

#include "topogrow/vec3.hpp"

namespace topogrow {

/// Classic gradient-lattice noise with a seeded permutation table.
class PerlinNoise3 {
public:
    explicit PerlinNoise3(std::uint64_t seed);

    /// Raw noise, in [-1, 1].
    double value(const Vec3& p) const;

    /// Affinely mapped to [0, 1] and clamped.
    double value01(const Vec3& p) const;

private:
    std::array<std::uint8_t, 512> perm_{};
};

/// Nearest-feature-point (cellular / Worley) noise, one feature per unit cell.
class CellularNoise3 {
public:
    explicit CellularNoise3(std::uint64_t seed) : seed_(seed) {}

    /// F1 distance normalized by sqrt(3) (the max possible with a 3^3 cell
    /// search), clamped to [0, 1].
    double value01(const Vec3& p) const;

private:
    std::uint64_t seed_;
};

}  // namespace topogrow
