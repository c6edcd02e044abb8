#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace herd {

/// Engine used for every stochastic routine: 64-bit Mersenne Twister.
using Engine = std::mt19937_64;

/// One SplitMix64 step (Steele, Lea & Flood), used as a bijective mixer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of an independent stream addressed by (seed, k1, k2, ...). Each key
/// is folded in with SplitMix64, so streams depend only on their address and
/// never on scheduling order.
std::uint64_t stream_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) noexcept;

Engine make_engine(std::uint64_t seed, std::initializer_list<std::uint64_t> keys = {});

}  // namespace herd
