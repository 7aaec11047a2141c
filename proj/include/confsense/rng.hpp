#pragma once

#include <cstdint>

#include "confsense/math.hpp"

namespace confsense::rng {

/// Identifier of the generator contract, recorded alongside every stochastic
/// output so results can be re-derived later.
inline constexpr char kAlgorithmId[] = "splitmix64ctr/v1/chunk4096";

/// Rows are generated in fixed chunks of this size; the value at a given
/// (seed, stream, row) is independent of how work is split across threads.
inline constexpr std::uint64_t kChunkSize = 4096;

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

/// splitmix64 finalizer (bijective 64-bit mix).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

/// Key of a named substream (one per SCM node, for instance).
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix64(mix64(seed + kGolden) + (stream + 1) * kGolden);
}

/// Raw 64-bit draw at absolute position `i` of a stream. Counter mode over
/// (chunk, offset), so any chunk can be produced without generating the rest.
constexpr std::uint64_t at(std::uint64_t key, std::uint64_t i) noexcept {
    const std::uint64_t chunk = i / kChunkSize;
    const std::uint64_t offset = i % kChunkSize;
    return mix64(mix64(key + (chunk + 1) * kGolden) + (offset + 1) * kGolden);
}

/// Uniform draw strictly inside (0,1): 53 mantissa bits, centered half-step.
inline double uniform01(std::uint64_t key, std::uint64_t i) noexcept {
    return (static_cast<double>(at(key, i) >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal draw by inverse-CDF; one uniform per variate keeps the
/// stream position a pure function of the row index.
inline double standard_normal(std::uint64_t key, std::uint64_t i) {
    return normal_quantile(uniform01(key, i));
}

} // namespace confsense::rng
