#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace predsets {

// Small splittable generator. Replication r of a run seeded with s draws
// from substream(s, r), so results are independent of loop scheduling and
// identical across platforms.
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
    return SplitMix64(mix64(seed + 0x9e3779b97f4a7c15ULL) ^ mix64(~index));
}

// Exact Binomial(n, p) as a sum of Bernoulli draws.
inline std::int64_t binomial(SplitMix64& gen, std::int64_t n, double p) {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return n;
    std::int64_t c = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        c += gen.uniform() < p ? 1 : 0;
    }
    return c;
}

// Multinomial counts via sequential binomial conditionals, exact for the
// joint counts distribution.
inline std::vector<std::int64_t> multinomial(SplitMix64& gen, std::span<const double> theta,
                                             std::int64_t n) {
    const int k_cat = static_cast<int>(theta.size());
    std::vector<std::int64_t> counts(k_cat, 0);

    std::vector<double> suffix(k_cat + 1, 0.0);
    for (int i = k_cat - 1; i >= 0; --i) {
        suffix[i] = suffix[i + 1] + theta[i];
    }

    std::int64_t remaining = n;
    int last_positive = -1;
    for (int i = 0; i < k_cat && remaining > 0; ++i) {
        if (theta[i] <= 0.0) continue;
        last_positive = i;
        const double p = suffix[i] > 0.0 ? theta[i] / suffix[i] : 1.0;
        const std::int64_t draw = binomial(gen, remaining, p);
        counts[i] = draw;
        remaining -= draw;
    }
    if (remaining > 0 && last_positive >= 0) {
        counts[last_positive] += remaining;  // guards against rounding drift
    }
    return counts;
}

// One categorical draw; returns the 0-based category index.
inline int categorical(SplitMix64& gen, std::span<const double> theta) {
    const int k_cat = static_cast<int>(theta.size());
    double u = gen.uniform();
    for (int i = 0; i < k_cat; ++i) {
        u -= theta[i];
        if (u < 0.0) return i;
    }
    // Rounding drift: fall back to the last category with positive mass.
    for (int i = k_cat - 1; i >= 0; --i) {
        if (theta[i] > 0.0) return i;
    }
    return k_cat - 1;
}

}  // namespace predsets
