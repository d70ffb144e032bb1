#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace mre {

using Engine = std::mt19937_64;

/// SplitMix64 output function; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed of substream `index` under `seed`. Distinct indices give distinct
/// substream seeds for a fixed master seed.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Independent engine for (seed, index).
Engine substream(std::uint64_t seed, std::uint64_t index);

/// Labels used to separate the random streams of different consumers that
/// share one master seed.
enum class StreamTag : std::uint64_t {
  Responses = 0,
  Transforms = 1,
  Parameters = 2,
  Decisions = 3,
  Designs = 4,
  Orbit = 5,
  Oracle = 6,
};

/// Master seed for a tagged consumer of `seed`.
std::uint64_t tagged_seed(std::uint64_t seed, StreamTag tag) noexcept;

void fill_standard_normal(Engine& engine, std::span<double> out);

}  // namespace mre
