#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace levq {

using Rng = std::mt19937_64;

/// Independent generator for stream `stream` derived from a root seed.
/// Streams with different indices never share a seed sequence.
inline Rng make_stream(std::uint64_t root_seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(root_seed),
                      static_cast<std::uint32_t>(root_seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32), 0x5eedu};
    return Rng(seq);
}

inline double uniform01(Rng& rng) {
    // (0, 1]: safe to take logs of.
    return 1.0 - std::generate_canonical<double, 53>(rng);
}

inline double exponential(Rng& rng, double rate) {
    return -std::log(uniform01(rng)) / rate;
}

}  // namespace levq
