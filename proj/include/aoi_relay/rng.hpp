#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace aoi_relay {

/// Independent random streams used by one simulation run. Each stream is a
/// separate mt19937_64 whose seed mixes (seed, replication, stream id), so
/// changing how many draws one stream consumes never shifts another.
enum class Stream : std::uint64_t {
    arrivals = 1,
    fading_sr = 2,
    fading_rd = 3,
    decoding = 4,
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t replication, Stream stream) {
    return mix64(mix64(mix64(seed) ^ replication) ^ static_cast<std::uint64_t>(stream));
}

/// Uniform and exponential variates with the transforms spelled out, so that
/// results do not depend on the standard library's distribution classes.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t replication, Stream stream)
        : engine_(stream_seed(seed, replication, stream)) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

private:
    std::mt19937_64 engine_;
};

}  // namespace aoi_relay
