#pragma once

#include <cstdint>
#include <random>

namespace gradplay {

using Engine = std::mt19937_64;

/// Engine for one independent stream of a seeded experiment. Distinct
/// (seed, stream) pairs give unrelated sequences.
Engine MakeEngine(std::uint64_t seed, std::uint64_t stream = 0);

/// 64-bit child seed for stream `stream` of `seed`.
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream);

}  // namespace gradplay
