#pragma once

#include <cstdint>
#include <random>

namespace hsdoa::detail {

/// Engine keyed by (seed, trial); independent of call order and thread.
inline std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                    0x68736f61u};
  return std::mt19937_64(seq);
}

}  // namespace hsdoa::detail
