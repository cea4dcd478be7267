#pragma once

#include <cstdint>

namespace sylvan {

// splitmix64 step; the generator behind all procedural randomness in the
// project. Chosen over std::mt19937 so streams are cheap to fork and the
// byte-level output is pinned by us, not the standard library.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stateless mix of two 64-bit values; used for the master -> scene -> frame
// seed hierarchy so any frame is regenerable in isolation.
inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
    std::uint64_t s = parent ^ (0x9e3779b97f4a7c15ULL + (index << 1));
    splitmix64(s);
    std::uint64_t mixed = splitmix64(s);
    return mixed;
}

// Hash of a 2-D integer lattice point under a seed, for value noise.
inline std::uint64_t hash_lattice(std::uint64_t seed, std::int64_t x, std::int64_t y) {
    std::uint64_t s = seed;
    s ^= static_cast<std::uint64_t>(x) * 0x8febc95300000001ULL;
    splitmix64(s);
    s ^= static_cast<std::uint64_t>(y) * 0xc2b2ae3d27d4eb4fULL;
    splitmix64(s);
    return splitmix64(s);
}

// Sequential random stream with explicit state.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

private:
    std::uint64_t state_;
};

}  // namespace sylvan
