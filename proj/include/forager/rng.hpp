#pragma once

#include <cmath>
#include <cstdint>

namespace forager {

// Deterministic 64-bit generator (splitmix64) with hand-rolled distributions.
// Standard-library distributions are implementation-defined, so every draw in
// the project goes through this class to keep seeded runs bit-reproducible.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_int(std::uint64_t n) {
        // Rejection-free modulo is biased for huge n; n here is always small.
        return next_u64() % n;
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Polar Box-Muller, no cached spare so the draw count stays predictable.
    double normal(double mean = 0.0, double sd = 1.0) {
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        return mean + sd * u * std::sqrt(-2.0 * std::log(s) / s);
    }

    // Knuth multiplication method; fine for the small means used here.
    int poisson(double mean) {
        if (mean <= 0.0) return 0;
        const double limit = std::exp(-mean);
        int k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform01();
        } while (p > limit);
        return k - 1;
    }

    // Derive an independent child stream; mixing keeps streams decorrelated.
    Rng split(std::uint64_t stream) const {
        Rng child(state_ ^ (0x632be59bd9b4e019ULL * (stream + 1)));
        child.next_u64();
        return child;
    }

private:
    std::uint64_t state_;
};

// Stateless seed mixer for deriving per-episode / per-worker seeds.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace forager
