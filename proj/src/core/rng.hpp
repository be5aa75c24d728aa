#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace wtkp {

// Named sub-streams of one image. Each stage draws from its own stream so
// adding draws to one stage never shifts the values seen by another.
enum class StreamTag : std::uint64_t {
    Scene = 1,
    Background = 2,
    PixelNoise = 3,
    Fixtures = 4,
};

std::uint64_t splitmix64(std::uint64_t x);

// Seeded random stream with platform-independent distributions.
//
// std::uniform_real_distribution / std::normal_distribution are
// implementation-defined, so golden fixtures would drift between standard
// libraries. The engine (mt19937_64) is fully specified by the standard; the
// distributions below are written out so every value is reproducible.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 bits of resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double low, double high) { return low + (high - low) * uniform01(); }

    // Marsaglia polar method; the spare deviate is cached.
    double normal(double mean, double stddev);

    bool bernoulli(double p) { return uniform01() < p; }

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t index(std::uint64_t n);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Independent, reproducible stream for one (seed, image, stage) triple.
Rng derive_rng(std::uint64_t master_seed, std::uint64_t image_index, StreamTag tag = StreamTag::Scene);

}  // namespace wtkp
