#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace ectstat {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of an independent substream keyed by `keys` under `base`.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> keys) {
    std::uint64_t h = splitmix64(base);
    for (std::uint64_t k : keys) h = splitmix64(h ^ splitmix64(k));
    return h;
}

inline std::uint64_t key_of(double v) { return std::bit_cast<std::uint64_t>(v); }

using Engine = std::mt19937_64;

} // namespace ectstat
