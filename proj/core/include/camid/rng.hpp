#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace camid {

// Deterministic draws on top of std::mt19937_64. The engine is fully
// specified by the standard; std::*_distribution and std::shuffle are not,
// so every contract that promises bitwise reproducibility goes through
// these helpers instead.

inline double uniform_unit(std::mt19937_64& gen) {
    // 53 mantissa bits -> [0, 1)
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline double uniform_range(std::mt19937_64& gen, double lo, double hi) {
    return lo + (hi - lo) * uniform_unit(gen);
}

inline std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t n) {
    // rejection sampling, no modulo bias
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % n);
    std::uint64_t x = gen();
    while (x >= limit) x = gen();
    return x % n;
}

inline double normal_draw(std::mt19937_64& gen) {
    // Box-Muller, cosine branch only; two fresh uniforms per draw
    const double u1 = 1.0 - uniform_unit(gen);  // (0, 1]
    const double u2 = uniform_unit(gen);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
}

template <class T>
void deterministic_shuffle(std::vector<T>& xs, std::mt19937_64& gen) {
    // Fisher-Yates
    for (std::size_t i = xs.size(); i > 1; --i) {
        const std::uint64_t j = uniform_below(gen, i);
        std::swap(xs[i - 1], xs[j]);
    }
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(a) ^ (b + 0x9e3779b97f4a7c15ULL));
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix_seed(mix_seed(a, b), c);
}

}  // namespace camid
