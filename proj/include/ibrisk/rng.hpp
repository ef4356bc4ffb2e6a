#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace ibrisk {

// All randomness in the toolkit flows through RngStream so results are
// bit-identical across platforms and across worker counts. std::mt19937_64 is
// fully specified by the standard; the draw transformations below are our own
// because the <random> distributions are implementation-defined.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Counter-based sub-stream derivation: a master seed plus a path of labels
// (year, network index, seed-bank index, ...) maps to one engine seed.
// Chaining splitmix64 keeps distinct paths statistically independent.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = splitmix64(master ^ 0xA5A5A5A5A5A5A5A5ULL);
    for (std::uint64_t label : path) {
        s = splitmix64(s ^ splitmix64(label + 0x632BE59BD9B4E019ULL));
    }
    return s;
}

class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Uniform on [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // Integer in [0, n), unbiased via rejection.
    std::uint64_t uniform_index(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    double exponential(double rate) {
        return -std::log1p(-uniform01()) / rate;
    }

    // Marsaglia polar method; consumes a variable number of draws, which is
    // fine because synthetic-data generation owns its whole stream.
    double normal(double mean, double stddev) {
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        return mean + stddev * u * std::sqrt(-2.0 * std::log(s) / s);
    }

    double lognormal(double mu, double sigma) {
        return std::exp(normal(mu, sigma));
    }

  private:
    std::mt19937_64 engine_;
};

} // namespace ibrisk
