#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <utility>

namespace ogfs {

// std::mt19937_64 output is fixed by the standard; the distributions are
// not, so the helpers below keep seeded results identical across libraries.
using Rng = std::mt19937_64;

/// Uniform integer in [0, bound). bound must be > 0.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) {
    const std::uint64_t limit = Rng::max() - (Rng::max() % bound);
    std::uint64_t x = rng();
    while (x >= limit) {
        x = rng();
    }
    return x % bound;
}

template <class T>
void shuffle_in_place(std::span<T> items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_index(rng, i));
        std::swap(items[i - 1], items[j]);
    }
}

/// Uniform double in (0, 1).
inline double uniform_open(Rng& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Box-Muller standard normal draw.
inline double standard_normal(Rng& rng) {
    const double u1 = uniform_open(rng);
    const double u2 = uniform_open(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace ogfs
