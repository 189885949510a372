#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace rbsim {

namespace rng_detail {

// splitmix64 finalizer; used to decorrelate derived stream seeds.
inline std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace rng_detail

// Deterministic sub-stream seed from a master seed and up to three stream
// coordinates (purpose tag, outer index, inner index). Every worker owns the
// streams it derives, so results are independent of scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
    std::uint64_t s = rng_detail::mix(master);
    s = rng_detail::mix(s ^ a);
    s = rng_detail::mix(s ^ b);
    s = rng_detail::mix(s ^ c);
    return s;
}

// Stream purpose tags for derive_seed.
namespace stream_tag {
inline constexpr std::uint64_t kSequence = 1;    // per (length index, sequence index)
inline constexpr std::uint64_t kTrace = 2;       // fixed-detuning traces
inline constexpr std::uint64_t kRamsey = 3;      // Ramsey ensemble draws
inline constexpr std::uint64_t kWalk = 4;        // random-walk detuning path
inline constexpr std::uint64_t kSynthetic = 5;   // synthetic/test data generation
}  // namespace stream_tag

// Seeded random stream with explicitly specified samplers. The mt19937_64
// engine is standardized bit-for-bit, and the transforms below are plain
// arithmetic, so a stream's output is identical across platforms and builds.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t raw() { return eng_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n), n > 0. Fixed-point multiply keeps the draw
    // count at one engine call regardless of n.
    std::uint64_t uniform_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(eng_()) * static_cast<unsigned __int128>(n)) >> 64);
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Standard normal via Box-Muller; consumes two uniforms per pair and
    // caches the second value.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Standard Cauchy via inverse CDF.
    double cauchy(double scale) {
        double u = uniform01();
        while (u <= 0.0) u = uniform01();
        return scale * std::tan(std::numbers::pi * (u - 0.5));
    }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace rbsim
