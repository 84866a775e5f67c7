// noise.hpp: Seeded additive Gaussian noise on control pulses

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace bangbang {

struct NoiseConfig {
  double delta_I = 0.0;  // standard deviation in radians, absolute (not relative to the pulse)
  std::uint64_t seed = 1;

  void validate() const;
};

// Recorded in run metadata so statistics can be reproduced elsewhere.
inline constexpr std::string_view kNoiseGeneratorName =
    "std::mt19937_64 + std::normal_distribution<double>";

// One instance per run; draws once per perturbed pulse.
class PulseNoise {
 public:
  explicit PulseNoise(const NoiseConfig& cfg);

  // solved + xi, xi ~ Normal(0, delta_I^2). delta_I == 0 returns `solved` unchanged
  // without consuming a draw.
  double perturb(double solved);

  double draw();  // raw xi; requires delta_I > 0

  const NoiseConfig& config() const noexcept { return cfg_; }

 private:
  NoiseConfig cfg_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace bangbang
