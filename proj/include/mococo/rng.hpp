#pragma once

#include <cstdint>
#include <random>

namespace mococo {

using Rng = std::mt19937_64;

/// Independent random streams derived from one master seed. Each phase of a
/// run draws only from its own stream.
enum class RngStream : std::uint32_t {
  Initialisation = 1,
  Collaborators = 2,
  Breeding = 3,
  InitialStates = 4,
};

inline Rng makeRng(std::uint64_t masterSeed, RngStream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(masterSeed), static_cast<std::uint32_t>(masterSeed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

/// A plain seed for components that take a seed rather than a generator.
inline std::uint64_t deriveSeed(std::uint64_t masterSeed, RngStream stream) {
  auto rng = makeRng(masterSeed, stream);
  return rng();
}

}  // namespace mococo
