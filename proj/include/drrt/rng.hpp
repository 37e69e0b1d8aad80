#pragma once

#include <cstdint>
#include <random>

namespace drrt {

// splitmix64 step; used only to scramble seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Independent generator per purpose, all derived from one run seed.
// Stream 0 drives free-space sampling; stream 1 is reserved for future
// stochastic features. Keeping the streams separate guarantees that the
// sampling sequence of a run depends on the seed alone.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t state = seed ^ (0xD1342543DE82EF95ULL * (stream + 1));
    const std::uint64_t lo = splitmix64(state);
    const std::uint64_t hi = splitmix64(state);
    std::seed_seq seq{static_cast<std::uint32_t>(lo), static_cast<std::uint32_t>(lo >> 32),
                      static_cast<std::uint32_t>(hi), static_cast<std::uint32_t>(hi >> 32)};
    return std::mt19937_64(seq);
}

// Uniform double in [0, 1). Fixed bit recipe so the stream does not depend
// on the standard library's distribution implementation.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

}  // namespace drrt
