#include "gradplay/random.hpp"

#include <array>

namespace gradplay {

namespace {

std::seed_seq MakeSeedSeq(std::uint64_t seed, std::uint64_t stream) {
  return std::seed_seq{static_cast<std::uint32_t>(seed),
                       static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(stream),
                       static_cast<std::uint32_t>(stream >> 32)};
}

}  // namespace

Engine MakeEngine(std::uint64_t seed, std::uint64_t stream) {
  auto seq = MakeSeedSeq(seed, stream);
  return Engine(seq);
}

std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream) {
  auto seq = MakeSeedSeq(seed, stream);
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (static_cast<std::uint64_t>(words[1]) << 32) | words[0];
}

}  // namespace gradplay
