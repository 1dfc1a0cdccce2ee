#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace tsqc {

/// Mixes a master seed with up to two stream indices (splitmix64 steps) so
/// derived streams are decorrelated and stable across platforms and thread
/// counts.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

/// Seeded deterministic random stream. Every stochastic operation in the
/// library takes an explicit RandomStream, so a run is a pure function of its
/// seeds. Not thread-safe; give each thread its own stream.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Uniform integer in [0, n); n must be positive. Rejection sampling, unbiased.
    std::uint64_t below(std::uint64_t n);

    double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

private:
    std::mt19937_64 engine_;
};

} // namespace tsqc
