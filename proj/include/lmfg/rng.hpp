// Deterministic, portable random number utilities.
//
// Two flavours are used throughout the code base:
//  * CounterRng  -- stateless counter-based draws keyed on (seed, t, i),
//                   so per-agent noise is reproducible regardless of how
//                   work is split across threads.
//  * SeqRng      -- a sequential stream for one-off sampling (disorder,
//                   initial conditions). Implemented on the same mixer so
//                   results do not depend on the standard library's
//                   distribution internals.

#pragma once

#include <cmath>
#include <cstdint>

namespace lmfg {

// SplitMix64 finalizer. Good avalanche, cheap, stable across platforms.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t a,
                                  std::uint64_t b, std::uint64_t c = 0) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ a);
    h = mix64(h ^ b);
    h = mix64(h ^ c);
    return h;
}

// Uniform in [0, 1): 53 mantissa bits.
inline double to_unit(std::uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Uniform in (0, 1]: safe as a log() argument.
inline double to_unit_open(std::uint64_t h) {
    return (static_cast<double>(h >> 11) + 1.0) * 0x1.0p-53;
}

struct CounterRng {
    std::uint64_t seed = 0;

    double uniform01(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0) const {
        return to_unit(counter_hash(seed, a, b, c));
    }

    // Symmetric uniform on [-1, 1].
    double uniform_sym(std::uint64_t a, std::uint64_t b) const {
        return 2.0 * uniform01(a, b) - 1.0;
    }

    // Standard normal via Box-Muller on two sub-streams.
    double gaussian(std::uint64_t a, std::uint64_t b) const {
        double u1 = to_unit_open(counter_hash(seed, a, b, 1));
        double u2 = to_unit(counter_hash(seed, a, b, 2));
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }
};

class SeqRng {
  public:
    explicit SeqRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next_raw() { return counter_hash(seed_, n_++, 0); }

    double uniform01() { return to_unit(next_raw()); }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    double gaussian(double mean = 0.0, double stddev = 1.0) {
        std::uint64_t n = n_++;
        double u1 = to_unit_open(counter_hash(seed_, n, 1));
        double u2 = to_unit(counter_hash(seed_, n, 2));
        double z = std::sqrt(-2.0 * std::log(u1)) *
                   std::cos(2.0 * 3.14159265358979323846 * u2);
        return mean + stddev * z;
    }

    double lognormal(double mu, double sigma) {
        return std::exp(gaussian(mu, sigma));
    }

    // true with probability p
    bool bernoulli(double p) { return uniform01() < p; }

  private:
    std::uint64_t seed_;
    std::uint64_t n_ = 0;
};

} // namespace lmfg
