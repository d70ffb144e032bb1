#include "mre/rng.hpp"

namespace mre {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  // index * odd constant is a bijection mod 2^64, so is the xor with a fixed key
  return mix64(mix64(seed) ^ (index * 0xd1342543de82ef95ULL));
}

Engine substream(std::uint64_t seed, std::uint64_t index) {
  return Engine(substream_seed(seed, index));
}

std::uint64_t tagged_seed(std::uint64_t seed, StreamTag tag) noexcept {
  return mix64(seed + 0x632be59bd9b4e019ULL * (static_cast<std::uint64_t>(tag) + 1));
}

void fill_standard_normal(Engine& engine, std::span<double> out) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : out) v = normal(engine);
}

}  // namespace mre
