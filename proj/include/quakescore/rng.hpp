#pragma once

#include <cstdint>

namespace quakescore {

// Counter-based random numbers: every draw is a pure function of a key
// tuple, so replicate/case loops can run on any number of threads and
// still produce identical output. The mixer is SplitMix64's finalizer
// applied to a hashed key.
namespace rng {

inline uint64_t splitmix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t key(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
    uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ b);
    h = splitmix64(h ^ c);
    return h;
}

// Uniform in [0, 1) with 53 random bits.
inline double uniform01(uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline double uniform01(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
    return uniform01(key(seed, a, b, c));
}

// A tiny stateful generator for variable-length draws (event
// simulation), seeded from a counter-based key so streams stay
// reproducible and independent.
class Stream {
public:
    explicit Stream(uint64_t k) : state_(k) {}
    uint64_t next_u64() { state_ += 0x9e3779b97f4a7c15ULL; return splitmix64(state_); }
    double next_uniform() { return uniform01(next_u64()); }

private:
    uint64_t state_;
};

} // namespace rng
} // namespace quakescore
