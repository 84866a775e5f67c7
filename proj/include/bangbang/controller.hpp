// controller.hpp: Cyclic bang-bang restoration of the eight density-matrix components
//
// Every step lets one time step T of decoherence act and then applies one
// pulse. The pulse is chosen so that the component whose turn it is (in the
// fixed Component order, one per step) returns exactly to its initial value.
// Each component keeps its own clock: the number of steps and the pulse area
// accumulated since it was last restored. Its current value is the evolution
// map evaluated at (initial state, g(age * T), pulse area).

#pragma once

#include <array>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bangbang/evolution.hpp"
#include "bangbang/kernels.hpp"
#include "bangbang/noise.hpp"
#include "bangbang/state.hpp"

namespace bangbang {

struct SolverConfig {
  double interval_halfwidth = std::numbers::pi / 2.0;
  double root_tol = 1e-12;  // on |response - target|
  int max_iter = 200;
  int scan_intervals = 64;

  void validate() const;
};

struct RootSolution {
  double I = 0.0;
  double residual = 0.0;
  std::pair<double, double> bracket{0.0, 0.0};
};

// Solves response(pulse_sum + I) = target for I in [-halfwidth, halfwidth] and
// returns the root of smallest |I| (ties go to the negative root). A response
// that varies by no more than root_tol over the interval is treated as
// constant: I = 0 if it already meets the target, NoRootInInterval otherwise.
// Throws NoRootInInterval or NonConvergence.
RootSolution find_pulse(const ComponentResponse& response, double pulse_sum, double target,
                        const SolverConfig& cfg);

double solve_pulse(Component idx, const DensityMatrix& rho0, double g_since_reset,
                   double pulse_sum, double target, const SolverConfig& cfg, Regime regime,
                   EvolutionOptions opts = {});

struct ComponentClock {
  int age_steps = 0;
  double planned_sum = 0.0;  // intended pulses since reset; the solver plans with these
  double applied_sum = 0.0;  // pulses actually applied (intended + noise)

  friend bool operator==(const ComponentClock&, const ComponentClock&) = default;
};

struct ControlLedger {
  std::array<ComponentClock, kNumComponents> clocks{};
  int step = 0;  // completed steps
  double step_T = 0.0;

  // Component restored by the next step.
  Component next_component() const noexcept {
    return kComponentOrder[static_cast<std::size_t>(step) % kNumComponents];
  }
  const ComponentClock& clock(Component c) const noexcept { return clocks[index_of(c)]; }
};

struct PulseRecord {
  int step = 0;  // 1-based
  Component component = Component::Rho11R;
  double solved_I = 0.0;
  double applied_I = 0.0;
  double root_residual = 0.0;
  std::pair<double, double> bracket{0.0, 0.0};
};

struct StepOutcome {
  PulseRecord pulse;
  // Component values after the pulse, before the restored component's clock is reset.
  std::array<double, kNumComponents> controlled{};
  // Clocks used for `controlled` (also pre-reset).
  std::array<ComponentClock, kNumComponents> clocks{};
};

class Controller {
 public:
  // kernel.at(k) must hold g(k * step_T) for every age the run will reach.
  Controller(DensityMatrix initial, Regime regime, KernelTable kernel, double step_T,
             SolverConfig solver = {}, NoiseConfig noise = {}, EvolutionOptions opts = {});

  // Closed loop: solve for the pulse, perturb it, apply it.
  StepOutcome step();
  // Open loop: apply `pulse` as both the intended and the applied value.
  StepOutcome apply(double pulse);

  const ControlLedger& ledger() const noexcept { return ledger_; }
  const DensityMatrix& initial() const noexcept { return initial_; }
  const KernelTable& kernel() const noexcept { return kernel_; }
  Regime regime() const noexcept { return regime_; }

  // Value of component c from a clock: component(evolve(initial, g(age T), sum), c).
  double component_value(Component c, int age_steps, double pulse_sum) const;

 private:
  StepOutcome advance(double solved, double applied, double residual,
                      std::pair<double, double> bracket);

  DensityMatrix initial_;
  Regime regime_;
  KernelTable kernel_;
  SolverConfig solver_;
  EvolutionOptions opts_;
  PulseNoise noise_;
  ControlLedger ledger_;
};

struct RunFailure {
  int step = 0;       // step that failed (1-based)
  std::string kind;   // "NoRootInInterval", "NonConvergence", ...
  std::string message;
};

struct ControlRun {
  std::vector<StepOutcome> steps;  // completed steps only
  std::optional<RunFailure> failure;

  std::vector<PulseRecord> pulses() const;
};

// Runs num_steps closed-loop steps; the first solver failure stops the run
// and is recorded in `failure` with the completed steps retained.
ControlRun run_control(Controller& controller, int num_steps);

// Applies a fixed pulse sequence open loop (no solving, no noise).
ControlRun replay_pulses(Controller& controller, std::span<const double> pulses);

struct StabilizationReport {
  int first_stable_cycle = 0;  // 1-based
  std::array<double, kNumComponents> template_pulses{};
};

// Earliest cycle c with |I(k) - I(k+8)| <= tol for every step k in cycles >= c,
// compared on applied pulses. The template is the last complete cycle.
// Needs at least three complete cycles (ValidationError); NotStabilized otherwise.
StabilizationReport detect_stabilization(std::span<const PulseRecord> pulses, double tol);

}  // namespace bangbang
