#pragma once

#include <cstdint>
#include <random>

namespace qtm {

/// splitmix64 step; the standard finalizer, used to derive independent
/// per-trajectory seeds from (base seed, index) so ensembles reproduce
/// regardless of worker scheduling.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t s = base;
    std::uint64_t a = splitmix64(s);
    s ^= index * 0xD1342543DE82EF95ULL + 0x2545F4914F6CDD1DULL;
    std::uint64_t b = splitmix64(s);
    return a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2));
}

/// Uniform in (0, 1]; fixed 53-bit recipe so results do not depend on the
/// standard library's distribution implementations.
inline double uniform_open_closed(std::mt19937_64& eng) {
    return 1.0 - static_cast<double>(eng() >> 11) * (1.0 / 9007199254740992.0);
}

/// Uniform in [0, 1).
inline double uniform_closed_open(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * (1.0 / 9007199254740992.0);
}

} // namespace qtm
