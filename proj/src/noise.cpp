// noise.cpp

#include "bangbang/noise.hpp"

#include <cmath>
#include <sstream>

#include "bangbang/errors.hpp"

namespace bangbang {

void NoiseConfig::validate() const {
  if (!std::isfinite(delta_I) || delta_I < 0.0) {
    std::ostringstream msg;
    msg << "noise delta_I must be finite and >= 0 (got " << delta_I << ")";
    throw ValidationError(msg.str());
  }
}

PulseNoise::PulseNoise(const NoiseConfig& cfg)
    : cfg_(cfg), engine_(cfg.seed), normal_(0.0, cfg.delta_I > 0.0 ? cfg.delta_I : 1.0) {
  cfg_.validate();
}

double PulseNoise::draw() { return normal_(engine_); }

double PulseNoise::perturb(double solved) {
  if (cfg_.delta_I == 0.0) return solved;
  return solved + draw();
}

}  // namespace bangbang
