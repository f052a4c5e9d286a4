#pragma once

#include <cstdint>
#include <random>

namespace rcsp {

/// Seed for every sampler. Same seed + same parameters gives the same output.
struct Seed {
    std::uint64_t value = 0;
};

/// splitmix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Child seed for stream `index` of `parent`. Trials and grid cells use this
/// so results do not depend on execution order.
constexpr Seed derive(Seed parent, std::uint64_t index) noexcept {
    return Seed{mix64(mix64(parent.value) ^ mix64(index + 0x632be59bd9b4e019ULL))};
}

constexpr Seed derive(Seed parent, std::uint64_t a, std::uint64_t b) noexcept {
    return derive(derive(parent, a), b);
}

using Rng = std::mt19937_64;

inline Rng make_rng(Seed s) { return Rng(s.value); }

}  // namespace rcsp
