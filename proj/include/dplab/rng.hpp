#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace dplab {

/// One round of the splitmix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed of realization `index` derived from `base`; reproducible in isolation.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
    return splitmix64(base ^ splitmix64(index + 1));
}

/// Platform-independent random stream. The standard distributions are
/// implementation-defined, so only the raw mt19937_64 output is used.
class Random {
public:
    explicit Random(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double exponential() { return -std::log1p(-uniform()); }
    bool bernoulli(double p) { return uniform() < p; }

    /// Poisson count by summing unit-rate exponential gaps; O(mean).
    std::int64_t poisson(double mean) {
        std::int64_t k = 0;
        double t = exponential();
        while (t < mean) {
            ++k;
            t += exponential();
        }
        return k;
    }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace dplab
