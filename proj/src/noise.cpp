#include "topogrow/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "topogrow/rng.hpp"

namespace topogrow {

namespace {

double fade(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }
double lerp(double a, double b, double t) { return a + t * (b - a); }

/// Classic 12-gradient set (cube edge midpoints), extended to 16 entries.
double grad(int hash, double x, double y, double z) {
    switch (hash & 15) {
        case 0: return x + y;
        case 1: return -x + y;
        case 2: return x - y;
        case 3: return -x - y;
        case 4: return x + z;
        case 5: return -x + z;
        case 6: return x - z;
        case 7: return -x - z;
        case 8: return y + z;
        case 9: return -y + z;
        case 10: return y - z;
        case 11: return -y - z;
        case 12: return x + y;
        case 13: return -y + z;
        case 14: return -x + y;
        default: return -y - z;
    }
}

}  // namespace

PerlinNoise3::PerlinNoise3(std::uint64_t seed) {
    std::array<std::uint8_t, 256> table;
    std::iota(table.begin(), table.end(), 0);
    Rng rng(seed);
    for (int i = 255; i > 0; --i) {
        const int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
        std::swap(table[i], table[j]);
    }
    for (int i = 0; i < 512; ++i) perm_[i] = table[i & 255];
}

double PerlinNoise3::value(const Vec3& p) const {
    const double fx = std::floor(p.x), fy = std::floor(p.y), fz = std::floor(p.z);
    const int X = static_cast<int>(fx) & 255;
    const int Y = static_cast<int>(fy) & 255;
    const int Z = static_cast<int>(fz) & 255;
    const double x = p.x - fx, y = p.y - fy, z = p.z - fz;
    const double u = fade(x), v = fade(y), w = fade(z);

    const int A = perm_[X] + Y, AA = perm_[A] + Z, AB = perm_[A + 1] + Z;
    const int B = perm_[X + 1] + Y, BA = perm_[B] + Z, BB = perm_[B + 1] + Z;

    return lerp(lerp(lerp(grad(perm_[AA], x, y, z), grad(perm_[BA], x - 1, y, z), u),
                     lerp(grad(perm_[AB], x, y - 1, z), grad(perm_[BB], x - 1, y - 1, z), u), v),
                lerp(lerp(grad(perm_[AA + 1], x, y, z - 1), grad(perm_[BA + 1], x - 1, y, z - 1), u),
                     lerp(grad(perm_[AB + 1], x, y - 1, z - 1),
                          grad(perm_[BB + 1], x - 1, y - 1, z - 1), u),
                     v),
                w);
}

double PerlinNoise3::value01(const Vec3& p) const {
    return std::clamp(0.5 * (value(p) + 1.0), 0.0, 1.0);
}

double CellularNoise3::value01(const Vec3& p) const {
    const int cx = static_cast<int>(std::floor(p.x));
    const int cy = static_cast<int>(std::floor(p.y));
    const int cz = static_cast<int>(std::floor(p.z));
    double best2 = std::numeric_limits<double>::infinity();
    for (int dz = -1; dz <= 1; ++dz) {
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int gx = cx + dx, gy = cy + dy, gz = cz + dz;
                std::uint64_t h = hash_mix({seed_, static_cast<std::uint64_t>(gx) * 0x9E3779B9ull,
                                            static_cast<std::uint64_t>(gy) * 0x85EBCA6Bull,
                                            static_cast<std::uint64_t>(gz) * 0xC2B2AE35ull});
                Rng cell_rng(h);
                const Vec3 feature{gx + cell_rng.next_double(), gy + cell_rng.next_double(),
                                   gz + cell_rng.next_double()};
                best2 = std::min(best2, norm2(p - feature));
            }
        }
    }
    return std::clamp(std::sqrt(best2) / std::sqrt(3.0), 0.0, 1.0);
}

}  // namespace topogrow
