#pragma once

#include <cstdint>
#include <random>

namespace faultroute {

/// Seedable 64-bit generator with a platform-independent [0, 1) conversion.
class Rng {
 public:
  static constexpr const char* kGeneratorName = "mt19937_64";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// 53 random bits scaled into [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// Seed for replication i of a run seeded with `seed`.
constexpr std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t i) { return seed ^ i; }

}  // namespace faultroute
