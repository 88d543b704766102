#pragma once

#include <cmath>
#include <cstdint>

namespace dsu {

// splitmix64, used for seeding and for deriving independent sub-streams.
// Constants from Sebastiano Vigna's reference implementation.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256** seeded via splitmix64. Integer state only, so the stream is
// identical on every platform.
class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& s : state_) s = splitmix64(sm);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller; computes a fresh pair each call and discards the second
    // value so the stream position per call is fixed.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return r * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // Integer in [0, n), n > 0. Modulo bias is irrelevant at our n.
    uint64_t next_below(uint64_t n) { return next_u64() % n; }

    // Independent stream for a tagged sub-task (e.g. one utterance).
    Rng derive(uint64_t tag) const {
        uint64_t sm = state_[0] ^ (tag * 0x9e3779b97f4a7c15ULL);
        return Rng(splitmix64(sm));
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t state_[4];
};

// FNV-1a over bytes; used for utterance-id hashing and run identities.
inline uint64_t fnv1a64(const void* data, size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    uint64_t h = 0xcbf29ce484222325ULL;
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

template <typename Str>
uint64_t fnv1a64(const Str& s) {
    return fnv1a64(s.data(), s.size());
}

}  // namespace dsu
