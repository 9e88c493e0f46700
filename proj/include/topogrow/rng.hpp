#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace topogrow {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Combines values into a stream seed. Order-sensitive.
inline std::uint64_t hash_mix(std::initializer_list<std::uint64_t> values) {
    std::uint64_t state = 0x8C9B2D4F5A6E7081ull;
    for (std::uint64_t v : values) {
        state ^= v;
        (void)splitmix64(state);
    }
    return splitmix64(state);
}

inline std::uint64_t hash_string(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

/// Deterministic, platform-independent generator. std::* distributions are
/// implementation-defined, so all draws go through explicit formulas here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    /// Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Uniform in [0, n), Lemire reduction.
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    /// Uniform integer in [lo, hi] inclusive.
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(next_below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    bool bernoulli(double p) { return next_double() < p; }

private:
    std::uint64_t state_;
};

}  // namespace topogrow
