#pragma once

#include <cstdint>
#include <cmath>

// Deterministic, platform-independent random number generation.
// All stochastic code in the library derives its streams from a user seed
// through sub_seed(), so results are reproducible bit-for-bit for a fixed
// seed regardless of call interleaving or thread count.

namespace pwlab {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Derives an independent stream seed from a base seed and a tag.
inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ull + (tag << 1));
    splitmix64(s);
    return splitmix64(s);
}

inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t tag_a, std::uint64_t tag_b) {
    return sub_seed(sub_seed(seed, tag_a), tag_b);
}

// Small counter-based generator; uniform doubles are produced from the top
// 53 bits so the sequence does not depend on the standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ^ 0xd1b54a32d192ed03ull) {
        // warm up so that nearby seeds decorrelate
        splitmix64(state_);
        splitmix64(state_);
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    std::uint64_t uniform_index(std::uint64_t n) {
        return n ? next_u64() % n : 0;
    }

private:
    std::uint64_t state_;
};

} // namespace pwlab
