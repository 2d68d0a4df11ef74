#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mmbc {

// Deterministic random source. All stochastic code in the library draws
// through this class so a run is reproducible from a single 64-bit seed.
// Distributions are hand-rolled on top of the raw mt19937_64 stream: the
// standard <random> distributions are implementation-defined, which would
// make "same seed, same experiment" depend on the standard library build.
class SeededRng {
public:
    explicit SeededRng(uint64_t seed) : engine_(seed), seed_(seed) {}

    uint64_t seed() const { return seed_; }

    uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 bits of mantissa.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal via Box-Muller. No cached spare: one draw consumes two
    // uniforms, which keeps the stream position a pure function of the number
    // of calls made so far.
    double normal() {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Standard Laplace (location 0, scale 1) by inverse CDF.
    double laplace() {
        const double u = uniform01() - 0.5;
        const double a = 1.0 - 2.0 * std::abs(u);
        const double mag = -std::log(a > 0.0 ? a : 0x1.0p-53);
        return u < 0.0 ? -mag : mag;
    }

    // Uniform integer in [0, n).
    size_t index(size_t n) {
        const size_t i = static_cast<size_t>(uniform01() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

    // Derive an independent child stream; tag keeps e.g. data generation and
    // training on separate streams for the same experiment seed.
    SeededRng child(uint64_t tag) const { return SeededRng(mix(seed_ ^ (tag * 0x9e3779b97f4a7c15ull))); }

    std::mt19937_64& engine() { return engine_; }

private:
    static uint64_t mix(uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    std::mt19937_64 engine_;
    uint64_t seed_;
};

}  // namespace mmbc
