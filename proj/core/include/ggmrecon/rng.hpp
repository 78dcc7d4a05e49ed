#pragma once

#include <cstdint>
#include <random>

namespace ggmrecon {

using Rng = std::mt19937_64;

/// Independent generator for task `stream` under a run-level `seed`.
/// Streams are a pure function of (seed, stream), so results do not depend on
/// how tasks are scheduled across threads.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x9e3779b9u};
  return Rng(seq);
}

}  // namespace ggmrecon
