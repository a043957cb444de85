#pragma once

// Deterministic randomness. All streams are derived from user seeds with
// splitmix64 so that results are bit-identical across platforms and across
// thread counts: every parallel work unit owns a stream keyed by its index,
// never by its scheduling order.
//
// std::uniform_*_distribution is implementation-defined, so uniform doubles
// and bounded integers are generated here by explicit bit arithmetic.

#include <cstdint>
#include <initializer_list>
#include <random>

namespace domlc {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Hash-combines a seed with stream coordinates (epoch, worker, chunk, ...).
inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> parts) {
    std::uint64_t s = seed;
    std::uint64_t h = splitmix64(s);
    for (std::uint64_t p : parts) {
        s ^= p + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
        h ^= splitmix64(s);
    }
    return h;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0,1), 53 random bits.
    double next_unit() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    // Uniform in [0,bound). Rejection-free path would be biased; reject the
    // short tail instead so the distribution is exact.
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % bound;
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % bound;
    }

    int next_index(int bound) {
        return static_cast<int>(next_below(static_cast<std::uint64_t>(bound)));
    }

private:
    std::mt19937_64 eng_;  // bit-exact sequence mandated by the standard
};

}  // namespace domlc
