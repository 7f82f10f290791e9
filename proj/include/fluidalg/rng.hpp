#pragma once

#include <array>
#include <cstdint>

namespace fluidalg {

/// SplitMix64 (Steele, Lea, Flood 2014). Used to expand a 64-bit seed into
/// generator state and to derive independent sub-seeds.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();

private:
    std::uint64_t state_;
};

/// xoshiro256** 1.0 (Blackman & Vigna). State is filled with four successive
/// SplitMix64 outputs of the seed, so the bit stream is fully determined by a
/// single uint64 and is identical on every platform.
///
/// Derived quantities:
///   uniform()  = (next() >> 11) * 2^-53, in [0, 1)
///   normal()   = sqrt(-2 ln(1 - u1)) * cos(2 pi u2), one normal per two
///                uniform draws (the sine branch is discarded)
class Xoshiro256StarStar {
public:
    explicit Xoshiro256StarStar(std::uint64_t seed);

    std::uint64_t next();
    double uniform();
    double normal();

private:
    std::array<std::uint64_t, 4> s_{};
};

/// Derives a sub-seed from (seed, stream) so that retries and independent
/// sample streams never share a generator state.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace fluidalg
