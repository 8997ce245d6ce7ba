#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace qglab {

/// Counter-based random draws: every value is a pure function of a key tuple,
/// so a path can be extended into the past (or queried from any number of
/// workers) without disturbing draws that were already defined.
namespace rng {

/// Stream tags keep independent uses of the same (seed, mode, bin) key apart.
enum class Stream : std::uint64_t {
    bin_increment = 0x01,  // per-bin Wiener increments
    bridge        = 0x02,  // dyadic refinement inside a bin
    ou_residual   = 0x03,  // conditional remainder of the OU convolution
    ou_anchor     = 0x04,  // stationary draw at an anchor bin
    field_init    = 0x05,  // random initial data
    experiment    = 0x06,  // driver-level sampling (seed fans, etc.)
};

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
}

/// Hash a key tuple into one 64-bit word (splitmix-style absorption).
struct Key {
    std::uint64_t state;

    explicit Key(std::uint64_t seed) : state(mix64(seed ^ 0x9e3779b97f4a7c15ull)) {}

    Key& absorb(std::uint64_t w) {
        state = mix64(state + 0x9e3779b97f4a7c15ull + w);
        return *this;
    }
    Key& absorb_i64(std::int64_t w) { return absorb(static_cast<std::uint64_t>(w)); }

    std::uint64_t digest(std::uint64_t counter) const {
        return mix64(state + 0x9e3779b97f4a7c15ull * (counter + 1));
    }
};

/// Uniform double in the open interval (0,1); safe under log().
inline double uniform01(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// One standard normal from a finished key (Box-Muller, exact in law).
inline double normal(const Key& key) {
    const double u1 = uniform01(key.digest(0));
    const double u2 = uniform01(key.digest(1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

/// Two independent standard normals from one key.
inline std::pair<double, double> normal_pair(const Key& key) {
    const double u1 = uniform01(key.digest(0));
    const double u2 = uniform01(key.digest(1));
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    return {r * std::cos(a), r * std::sin(a)};
}

}  // namespace rng
}  // namespace qglab
