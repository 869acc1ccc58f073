#pragma once

#include <cstdint>
#include <random>

namespace pftube {

using Rng = std::mt19937_64;

/// Independent generator for substream `stream` of master `seed`.
/// The engine seed is a splitmix64 mix of both values, so substreams can be
/// created in any order (or in parallel) and always replay identically.
Rng substream(std::uint64_t seed, std::uint64_t stream);

/// Derives a child master seed, e.g. one per sweep entry.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

}  // namespace pftube
