#pragma once

// Seedable sampling. Uniform reals are built from raw 64-bit draws so the
// streams are identical across standard library implementations.

#include <cstdint>
#include <random>

namespace weil {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
    const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * unit;
}

inline int uniform_int(Rng& rng, int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(rng() % span);
}

/// Independent stream for sample `index` of a run seeded with `seed`.
inline Rng derive_stream(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return Rng(seq);
}

}  // namespace weil
