#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace osmosim {

using Cycle = std::uint64_t;
using Bytes = std::uint64_t;
using FlowId = std::uint32_t;
using FmqId = std::uint32_t;
using PuId = std::uint32_t;
using Priority = std::uint16_t;

inline constexpr Cycle kUnlimitedCycles = std::numeric_limits<Cycle>::max();

// Violated SimConfig / FlowSpec invariant. CLI exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// L2 segment or SLO memory quota exhausted.
struct AllocationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Match rule overlaps a rule of an active ECTX.
struct RuleConflict : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Scenario-level problem (unknown preset, malformed scenario file). CLI exit code 2.
struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) {
  return (a + b - 1) / b;
}

// splitmix64 finalizer, used to derive independent seeds for sub-streams.
inline constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace osmosim
