#pragma once

#include <array>
#include <cstdint>

namespace rnr {

/// xoshiro256** seeded through splitmix64.
///
/// Both algorithms are fixed by their published constants, so a seed yields
/// the same stream on every platform:
///   splitmix64: x += 0x9E3779B97F4A7C15; z = (z ^ z>>30) * 0xBF58476D1CE4E5B9;
///               z = (z ^ z>>27) * 0x94D049BB133111EB; return z ^ z>>31
///   xoshiro256**: result = rotl(s1 * 5, 7) * 9; t = s1 << 17;
///               s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t; s3 = rotl(s3, 45)
class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed);

    std::uint64_t next();

    /// Uniform double in [0, 1) from the top 53 bits.
    double uniform();

    /// Standard normal via Box-Muller (one draw per call, the pair's sine half
    /// is discarded so the stream position is independent of call history).
    double gaussian();

private:
    std::array<std::uint64_t, 4> s_{};
};

}  // namespace rnr
