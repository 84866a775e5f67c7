// evolution.hpp: Closed-form reduced dynamics under decoherence plus control
//
// Each map takes the state at the element's last reset, the decoherence g
// accumulated since then and the accumulated pulse area I, and returns the
// reduced density matrix. The formulas are transcribed as printed, including
// the thermal off-diagonal structure Re{rho12(0)} + Im{rho12(0)} cos 2I,
// which does not reduce to rho12(0) at I = 0 and does not keep rho21 equal
// to conj(rho12). Set `hermitize` to replace the output by its Hermitian
// part; that option is a departure from the printed maps.

#pragma once

#include "bangbang/kernels.hpp"
#include "bangbang/state.hpp"

namespace bangbang {

struct EvolutionInput {
  DensityMatrix rho0;
  double g = 0.0;  // >= 0
  double I = 0.0;  // accumulated pulse area, radians
};

struct EvolutionOptions {
  bool hermitize = false;
};

DensityMatrix evolve_adiabatic(const EvolutionInput& in);
DensityMatrix evolve_thermal(const EvolutionInput& in);

DensityMatrix evolve(Regime regime, const EvolutionInput& in, EvolutionOptions opts = {});

DensityMatrix zero_control_adiabatic(const DensityMatrix& rho0, double g);
DensityMatrix zero_control_thermal(const DensityMatrix& rho0, double g);
DensityMatrix zero_control(Regime regime, const DensityMatrix& rho0, double g);

// (M + M^dagger) / 2.
DensityMatrix hermitian_part(const DensityMatrix& rho);

// I -> component(evolve(rho0, g, I), idx). The root finder works only
// through this, so the matrix formulas live in one place.
class ComponentResponse {
 public:
  ComponentResponse(Component idx, const DensityMatrix& rho0, double g, Regime regime,
                    EvolutionOptions opts = {})
      : idx_(idx), rho0_(rho0), g_(g), regime_(regime), opts_(opts) {}

  double operator()(double I) const {
    return evolve(regime_, {rho0_, g_, I}, opts_).component(idx_);
  }

  Component component() const noexcept { return idx_; }

 private:
  Component idx_;
  DensityMatrix rho0_;
  double g_;
  Regime regime_;
  EvolutionOptions opts_;
};

inline ComponentResponse component_response(Component idx, const DensityMatrix& rho0, double g,
                                            Regime regime, EvolutionOptions opts = {}) {
  return ComponentResponse(idx, rho0, g, regime, opts);
}

}  // namespace bangbang
