#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string_view>

namespace sfgsim::rng {

// splitmix64 finalizer: bijective avalanche mix of a 64-bit word.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Named substream derivation. Streams derived from the same master seed with
// different names are independent for simulation purposes; the same (seed, name)
// always yields the same stream. Counter-based layout keeps every consumer
// reproducible regardless of thread count.
inline std::uint64_t substream_seed(std::uint64_t master, std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return mix64(master ^ mix64(h));
}

inline std::uint64_t substream_seed(std::uint64_t master, std::string_view name,
                                    std::uint64_t index) {
    return mix64(substream_seed(master, name) ^ mix64(index ^ 0x5bf03635aaf3b26bull));
}

// Stateless keyed draws: one uniform word per (stream, key) pair, order independent.
inline std::uint64_t keyed_u64(std::uint64_t stream, std::uint64_t a,
                               std::uint64_t b = 0) {
    return mix64(stream ^ mix64(a ^ 0x9e6c63d0876a9a47ull) ^
                 mix64(b ^ 0xd1b54a32d192ed03ull));
}

inline double u64_to_unit(std::uint64_t w) {
    // 53 significant bits -> double in [0, 1).
    return static_cast<double>(w >> 11) * 0x1.0p-53;
}

inline double keyed_uniform01(std::uint64_t stream, std::uint64_t a,
                              std::uint64_t b = 0) {
    return u64_to_unit(keyed_u64(stream, a, b));
}

inline bool keyed_bernoulli(std::uint64_t stream, std::uint64_t a, std::uint64_t b,
                            double p) {
    return keyed_uniform01(stream, a, b) < p;
}

// Sequential generator over the splitmix64 output sequence. Cheap to construct;
// every consumer owns its own instance seeded via substream_seed.
class Stream {
  public:
    explicit Stream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    double uniform01() { return u64_to_unit(next_u64()); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    bool bernoulli(double p) { return uniform01() < p; }

    // Exponential with the given mean (inverse CDF; argument of log is in (0, 1]).
    double exponential(double mean) {
        return -mean * std::log(1.0 - uniform01());
    }

    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        // Box-Muller; u1 in (0, 1] to keep the log finite.
        double u1 = 1.0 - uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.28318530717958647692 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    // Knuth product method below 30 expected counts, rounded Gaussian above
    // (error O(1/sqrt(mean)) in the tails, negligible for mean >> 30 uses here).
    std::uint64_t poisson(double mean) {
        if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be >= 0");
        if (mean == 0.0) return 0;
        if (mean < 30.0) {
            double limit = std::exp(-mean);
            double prod = uniform01();
            std::uint64_t k = 0;
            while (prod > limit) {
                ++k;
                prod *= uniform01();
            }
            return k;
        }
        double draw = mean + std::sqrt(mean) * normal();
        if (draw < 0.0) return 0;
        return static_cast<std::uint64_t>(std::llround(draw));
    }

  private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace sfgsim::rng
