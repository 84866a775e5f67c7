// evolution.cpp

#include "bangbang/evolution.hpp"

#include <cmath>

namespace bangbang {

namespace {

constexpr Complex kI{0.0, 1.0};

}  // namespace

DensityMatrix evolve_adiabatic(const EvolutionInput& in) {
  const DensityMatrix& r = in.rho0;
  const double c = std::cos(in.I);
  const double s = std::sin(in.I);
  const double decay = std::exp(-in.g);
  const Complex coherence = kI * (r.rho12() - r.rho21()) * decay * c * s;
  const Complex population = kI * (r.rho22() - r.rho11()) * c * s;

  const Complex rho11 = r.rho11() * c * c + r.rho22() * s * s - coherence;
  const Complex rho22 = r.rho22() * c * c + r.rho11() * s * s + coherence;
  const Complex rho12 = r.rho12() * decay * c * c + r.rho21() * decay * s * s + population;
  const Complex rho21 = r.rho21() * decay * c * c + r.rho12() * decay * s * s - population;
  return DensityMatrix(rho11, rho12, rho21, rho22);
}

DensityMatrix evolve_thermal(const EvolutionInput& in) {
  const DensityMatrix& r = in.rho0;
  const double c2 = std::cos(2.0 * in.I);
  const double s2 = std::sin(2.0 * in.I);
  const double decay = std::exp(-in.g);
  const double decay2 = std::exp(-2.0 * in.g);
  const Complex inversion = r.rho11() - r.rho22();
  const Complex coherence = kI * (r.rho12() - r.rho21()) * decay * s2;

  const Complex rho11 = 0.5 * (1.0 + inversion * decay2 * c2 - coherence);
  const Complex rho22 = 0.5 * (1.0 - inversion * decay2 * c2 + coherence);
  const Complex rho12 = (r.rho12().real() + r.rho12().imag() * c2) * decay -
                        0.5 * kI * (inversion * decay2 * s2);
  const Complex rho21 = (r.rho21().real() + r.rho21().imag() * c2) * decay +
                        0.5 * kI * (inversion * decay2 * s2);
  return DensityMatrix(rho11, rho12, rho21, rho22);
}

DensityMatrix hermitian_part(const DensityMatrix& rho) {
  const Complex off = 0.5 * (rho.rho12() + std::conj(rho.rho21()));
  return DensityMatrix(Complex(rho.rho11().real(), 0.0), off, std::conj(off),
                       Complex(rho.rho22().real(), 0.0));
}

DensityMatrix evolve(Regime regime, const EvolutionInput& in, EvolutionOptions opts) {
  DensityMatrix out = regime == Regime::Adiabatic ? evolve_adiabatic(in) : evolve_thermal(in);
  return opts.hermitize ? hermitian_part(out) : out;
}

DensityMatrix zero_control_adiabatic(const DensityMatrix& rho0, double g) {
  // Same arithmetic as evolve_adiabatic at I = 0 so the two agree bit for bit.
  return evolve_adiabatic({rho0, g, 0.0});
}

DensityMatrix zero_control_thermal(const DensityMatrix& rho0, double g) {
  const double decay = std::exp(-g);
  const double decay2 = std::exp(-2.0 * g);
  const Complex inversion = rho0.rho11() - rho0.rho22();
  return DensityMatrix(0.5 * (1.0 + decay2 * inversion), rho0.rho12() * decay,
                       rho0.rho21() * decay, 0.5 * (1.0 - decay2 * inversion));
}

DensityMatrix zero_control(Regime regime, const DensityMatrix& rho0, double g) {
  return regime == Regime::Adiabatic ? zero_control_adiabatic(rho0, g)
                                     : zero_control_thermal(rho0, g);
}

}  // namespace bangbang
