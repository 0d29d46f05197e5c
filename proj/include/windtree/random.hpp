#pragma once

// Counter-based random streams: every sample owns a generator seeded from
// (seed, index, attempt), so draws never depend on scheduling.

#include <cstdint>
#include <random>

#include "windtree/table.hpp"

namespace windtree {

class SampleRng {
 public:
  SampleRng(std::uint64_t seed, std::uint64_t index, std::uint64_t attempt = 0)
      : engine_(hash_combine(hash_combine(seed, index), attempt)) {}

  /// Uniform on [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(engine_() % span);
  }

  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace windtree
