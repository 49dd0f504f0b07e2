// Seeding helpers shared by every stochastic component.
#pragma once

#include <cstdint>
#include <random>

namespace ehsim {

using Rng = std::mt19937_64;

/// SplitMix64 finaliser; spreads nearby seeds over the whole state space.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for stream number `index` derived from a parent seed.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept {
    return mix_seed(mix_seed(parent) ^ mix_seed(index + 0x632be59bd9b4e019ULL));
}

}  // namespace ehsim
