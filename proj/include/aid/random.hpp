#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace aid {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Used to derive independent child seeds.
std::uint64_t mix64(std::uint64_t x);

/// Child seed for a named or numbered stream of a parent seed.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream);
std::uint64_t derive_seed(std::uint64_t parent, std::string_view stream);

inline Rng make_rng(std::uint64_t seed) { return Rng(mix64(seed)); }

}  // namespace aid
