#pragma once

#include <cstdint>
#include <random>

namespace gfkchain {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Used to turn structured seeds (trial, domain, ...)
/// into well-mixed 64-bit engine seeds.
std::uint64_t mix_seed(std::uint64_t x) noexcept;

/// Deterministic child seed for stream `stream` of parent seed `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace gfkchain
