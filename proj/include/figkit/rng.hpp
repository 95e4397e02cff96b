#pragma once

#include <cstdint>
#include <initializer_list>

namespace figkit {

// SplitMix64 step. Used both as a stream generator and as the mixing
// function for seed derivation, so every derived seed is reproducible
// across platforms (no std::* distributions anywhere).
constexpr uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr uint64_t mix64(uint64_t x) {
    uint64_t s = x;
    return splitmix64(s);
}

// Order-sensitive combination of seed material.
constexpr uint64_t hash_combine(std::initializer_list<uint64_t> parts) {
    uint64_t h = 0x243f6a8885a308d3ULL;
    for (uint64_t p : parts) {
        h = mix64(h ^ (p + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
    }
    return h;
}

class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next() { return splitmix64(state_); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). n must be > 0.
    uint64_t below(uint64_t n) {
        // Rejection sampling keeps the draw unbiased and deterministic.
        uint64_t threshold = (0 - n) % n;
        for (;;) {
            uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    bool chance(double p) { return uniform() < p; }

    int pick_sign() { return chance(0.5) ? 1 : -1; }

private:
    uint64_t state_;
};

}  // namespace figkit
