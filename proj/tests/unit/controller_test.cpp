#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "bangbang/controller.hpp"
#include "bangbang/errors.hpp"

using namespace bangbang;

namespace {

constexpr double kPi = std::numbers::pi;
const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

DensityMatrix figure_state() { return from_pure_state({0.0, kInvSqrt2}, {kInvSqrt2, 0.0}); }

// i cos(theta)|1> + sin(theta)|2>: purely imaginary coherence and unequal
// populations, so every component can be restored when g is small enough.
DensityMatrix tilted_state(double theta) {
  return from_pure_state({0.0, std::cos(theta)}, {std::sin(theta), 0.0});
}

Controller make_controller(const DensityMatrix& rho0, Regime regime, double gamma, double T,
                           int steps, NoiseConfig noise = {}) {
  ModelParams p;
  p.regime = regime;
  p.gamma = gamma;
  return Controller(rho0, regime, KernelTable::uniform(T, steps, p, {}), T, {}, noise);
}

std::vector<double> applied(const ControlRun& run) {
  std::vector<double> out;
  for (const auto& s : run.steps) out.push_back(s.pulse.applied_I);
  return out;
}

// Smallest |I| in [-pi/2, pi/2] with I = base (mod pi); ties go negative.
double nearest_branch(double base) {
  double best = NAN;
  for (int m = -4; m <= 4; ++m) {
    const double I = base + m * kPi;
    if (std::abs(I) > kPi / 2.0 + 1e-15) continue;
    if (std::isnan(best) || std::abs(I) < std::abs(best) - 1e-9 ||
        (std::abs(std::abs(I) - std::abs(best)) <= 1e-9 && I < best)) {
      best = I;
    }
  }
  return best;
}

// Pulse sequence for the adiabatic map in the limit e^-g -> 0, worked out by
// hand: populations need sin(x) = 0, the imaginary coherences need
// sin(2x) = 2 Im rho12 / (rho22 - rho11), everything else is already at target.
std::vector<double> strong_dephasing_pulses(const DensityMatrix& rho0, int steps) {
  const double b = rho0.rho12().imag();
  const double d = (rho0.rho22() - rho0.rho11()).real();
  const double xs = 0.5 * std::asin(2.0 * b / d);
  std::vector<double> pulses;
  std::array<int, 8> last_reset{};
  for (int k = 1; k <= steps; ++k) {
    const int idx = (k - 1) % 8;
    double sum = 0.0;
    for (int j = last_reset[idx] + 1; j < k; ++j) sum += pulses[j - 1];
    double I = 0.0;
    if (idx == 0 || idx == 6) {
      I = nearest_branch(-sum);
    } else if (idx == 3 || idx == 5) {
      const double a = nearest_branch(xs - sum);
      const double c = nearest_branch(kPi / 2.0 - xs - sum);
      I = (std::abs(a) < std::abs(c) - 1e-9 || (std::abs(std::abs(a) - std::abs(c)) <= 1e-9 && a < c))
              ? a
              : c;
    }
    pulses.push_back(I);
    last_reset[idx] = k;
  }
  return pulses;
}

}  // namespace

TEST(SolvePulse, FigureStatePopulationNeedsNoPulse) {
  for (double g : {0.0, 0.5, 100.0}) {
    EXPECT_EQ(solve_pulse(Component::Rho11R, figure_state(), g, 0.0, 0.5, {}, Regime::Adiabatic),
              0.0);
  }
}

TEST(SolvePulse, FigureStateImaginaryCoherenceHasNoRoot) {
  EXPECT_THROW((void)solve_pulse(Component::Rho12I, figure_state(), 0.3, 0.0, 0.5, {},
                                 Regime::Adiabatic),
               NoRootInInterval);
}

TEST(SolvePulse, ConstantResponseAtTargetGivesZero) {
  EXPECT_EQ(solve_pulse(Component::Rho12R, figure_state(), 2.0, 0.7, 0.0, {}, Regime::Adiabatic),
            0.0);
  EXPECT_THROW((void)solve_pulse(Component::Rho12R, figure_state(), 2.0, 0.7, 0.1, {},
                                 Regime::Adiabatic),
               NoRootInInterval);
}

TEST(SolvePulse, MatchesClosedFormRoot) {
  // At g = 0 the imaginary coherence is b cos 2x + (d/2) sin 2x = R cos(2x - phi).
  const DensityMatrix rho0 = tilted_state(kPi / 7.0);
  const double b = rho0.rho12().imag();
  const double d = (rho0.rho22() - rho0.rho11()).real();
  const double R = std::hypot(b, d / 2.0);
  const double phi = std::atan2(d / 2.0, b);
  for (double target : {0.1, -0.2, 0.3}) {
    const double base = std::acos(target / R);
    double want = NAN;
    for (double x : {(phi + base) / 2.0, (phi - base) / 2.0}) {
      const double I = nearest_branch(x);
      if (std::isnan(want) || std::abs(I) < std::abs(want)) want = I;
    }
    const double got =
        solve_pulse(Component::Rho12I, rho0, 0.0, 0.0, target, {}, Regime::Adiabatic);
    EXPECT_NEAR(got, want, 1e-10) << target;
  }
}

TEST(SolvePulse, SymmetricRootsPreferNegative) {
  // Thermal real coherence of the figure state is 1/2 e^-g cos 2I: roots +-pi/4.
  const double I =
      solve_pulse(Component::Rho12R, figure_state(), 0.3, 0.0, 0.0, {}, Regime::Thermal);
  EXPECT_NEAR(I, -kPi / 4.0, 1e-12);
}

TEST(SolvePulse, IterationCapRaisesNonConvergence) {
  SolverConfig cfg;
  cfg.max_iter = 1;
  EXPECT_THROW((void)solve_pulse(Component::Rho12I, tilted_state(kPi / 7.0), 0.0, 0.0, 0.1, cfg,
                                 Regime::Adiabatic),
               NonConvergence);
}

TEST(Controller, NoDecoherenceNeedsNoPulses) {
  // The thermal map as written is not the identity at g = 0, I = 0 unless the
  // coherence is real, so the thermal case uses a real-amplitude state.
  const DensityMatrix real_state = from_pure_state({std::cos(0.4), 0.0}, {std::sin(0.4), 0.0});
  for (const auto& [r, rho0] : {std::pair{Regime::Adiabatic, figure_state()},
                                std::pair{Regime::Adiabatic, real_state},
                                std::pair{Regime::Thermal, real_state}}) {
    Controller ctl = make_controller(rho0, r, 0.0, 0.5, 32);
    const ControlRun run = run_control(ctl, 32);
    ASSERT_FALSE(run.failure) << run.failure->message;
    for (const auto& s : run.steps) {
      EXPECT_LE(std::abs(s.pulse.solved_I), 1e-12);
      for (std::size_t k = 0; k < kNumComponents; ++k) {
        EXPECT_NEAR(s.controlled[k], rho0.component(kComponentOrder[k]), 1e-12);
      }
    }
  }
}

TEST(Controller, ThermalFigureStateFailsEvenWithoutDecoherence) {
  // At g = 0 the thermal coherence is Re + Im cos 2I - i/2 (rho11 - rho22) sin 2I:
  // for the figure state its imaginary part vanishes for every I.
  Controller ctl = make_controller(figure_state(), Regime::Thermal, 0.0, 0.5, 16);
  const ControlRun run = run_control(ctl, 16);
  ASSERT_TRUE(run.failure);
  EXPECT_EQ(run.failure->step, 4);
  EXPECT_NEAR(run.steps[2].pulse.solved_I, -kPi / 4.0, 1e-12);
}

TEST(Controller, FigureStateStopsAtImaginaryCoherence) {
  Controller ctl = make_controller(figure_state(), Regime::Adiabatic, 1.0, 0.5, 80);
  const ControlRun run = run_control(ctl, 80);
  ASSERT_TRUE(run.failure);
  EXPECT_EQ(run.failure->step, 4);
  EXPECT_EQ(run.failure->kind, "NoRootInInterval");
  EXPECT_EQ(run.steps.size(), 3u);
  EXPECT_NE(run.failure->message.find("rho12I"), std::string::npos);
}

TEST(Controller, RestoredComponentHitsInitialValue) {
  for (Regime r : {Regime::Adiabatic, Regime::Thermal}) {
    const double gamma = r == Regime::Adiabatic ? 1.0 : 3e-4;
    const DensityMatrix rho0 = tilted_state(kPi / 12.0);
    Controller ctl = make_controller(rho0, r, gamma, 0.5, 80);
    const ControlRun run = run_control(ctl, 80);
    ASSERT_FALSE(run.failure) << run.failure->message;
    ASSERT_EQ(run.steps.size(), 80u);
    for (const auto& s : run.steps) {
      const std::size_t k = index_of(s.pulse.component);
      EXPECT_NEAR(s.controlled[k], rho0.component(s.pulse.component), 1e-9) << s.pulse.step;
    }
  }
}

TEST(Controller, LedgerReplayMatchesTrajectory) {
  for (Regime r : {Regime::Adiabatic, Regime::Thermal}) {
    const double gamma = r == Regime::Adiabatic ? 1.0 : 3e-4;
    const DensityMatrix rho0 = tilted_state(kPi / 12.0);
    Controller ctl = make_controller(rho0, r, gamma, 0.5, 40);
    const ControlRun run = run_control(ctl, 40);
    ASSERT_FALSE(run.failure);
    ModelParams p;
    p.regime = r;
    p.gamma = gamma;
    for (const auto& s : run.steps) {
      for (std::size_t k = 0; k < kNumComponents; ++k) {
        const ComponentClock& clock = s.clocks[k];
        // Fresh kernel evaluation at the clock's age, not the controller's table.
        const double g = decoherence(clock.age_steps * 0.5, p);
        const double want = evolve(r, {rho0, g, clock.applied_sum}).component(kComponentOrder[k]);
        EXPECT_NEAR(s.controlled[k], want, 1e-12);
      }
    }
  }
}

TEST(Controller, ClocksFollowCyclePattern) {
  const DensityMatrix rho0 = tilted_state(kPi / 12.0);
  Controller ctl = make_controller(rho0, Regime::Adiabatic, 1.0, 0.5, 24);
  const ControlRun run = run_control(ctl, 24);
  ASSERT_FALSE(run.failure);
  const std::vector<double> pulses = applied(run);
  // After step 16 the component restored j steps earlier has age j and the
  // sum of exactly the last j pulses.
  Controller fresh = make_controller(rho0, Regime::Adiabatic, 1.0, 0.5, 24);
  for (int k = 0; k < 16; ++k) (void)fresh.step();
  for (std::size_t c = 0; c < kNumComponents; ++c) {
    const int age = 7 - static_cast<int>(c);
    const ComponentClock& clock = fresh.ledger().clocks[c];
    EXPECT_EQ(clock.age_steps, age) << c;
    double sum = 0.0;
    for (int j = 16 - age; j < 16; ++j) sum += pulses[static_cast<std::size_t>(j)];
    EXPECT_EQ(clock.planned_sum, sum) << c;
  }
  // Step 9 restores rho11R from the pulses of steps 2..9.
  const ComponentClock& c9 = run.steps[8].clocks[0];
  EXPECT_EQ(c9.age_steps, 8);
  double sum = 0.0;
  for (int j = 1; j <= 8; ++j) sum += pulses[static_cast<std::size_t>(j)];
  EXPECT_EQ(c9.applied_sum, sum);
}

TEST(Controller, StrongDephasingPulsesMatchHandDerivedSequence) {
  const DensityMatrix rho0 = tilted_state(kPi / 12.0);
  Controller ctl = make_controller(rho0, Regime::Adiabatic, 1.0, 0.5, 80);
  const ControlRun run = run_control(ctl, 80);
  ASSERT_FALSE(run.failure);
  const std::vector<double> want = strong_dephasing_pulses(rho0, 80);
  // Population roots are double roots (sin^2 x), found only to about
  // sqrt(root_tol), and the error carries into later pulse sums.
  for (std::size_t k = 0; k < want.size(); ++k) {
    EXPECT_NEAR(run.steps[k].pulse.solved_I, want[k], 1e-7) << "step " << k + 1;
  }
}

TEST(Controller, RegressionPulsesFirstTwoCycles) {
  // Frozen from the first computation; the values agree with the
  // hand-derived sequence above.
  const double xs = 0.5 * std::asin(-std::tan(kPi / 6.0));
  const std::vector<double> frozen = {0, 0, 0, xs, 0, 0, -xs, 0,
                                      0, 0, 0, 2 * xs, 0, 0, -2 * xs, 0};
  Controller ctl = make_controller(tilted_state(kPi / 12.0), Regime::Adiabatic, 1.0, 0.5, 16);
  const ControlRun run = run_control(ctl, 16);
  ASSERT_FALSE(run.failure);
  for (std::size_t k = 0; k < frozen.size(); ++k) {
    EXPECT_NEAR(run.steps[k].pulse.applied_I, frozen[k], 1e-7) << "step " << k + 1;
  }
}

TEST(Controller, OpenLoopReplayReproducesClosedLoop) {
  for (Regime r : {Regime::Adiabatic, Regime::Thermal}) {
    const double gamma = r == Regime::Adiabatic ? 1.0 : 3e-4;
    const DensityMatrix rho0 = tilted_state(kPi / 12.0);
    Controller closed = make_controller(rho0, r, gamma, 0.5, 48);
    const ControlRun a = run_control(closed, 48);
    ASSERT_FALSE(a.failure);
    Controller open = make_controller(rho0, r, gamma, 0.5, 48);
    const std::vector<double> pulses = applied(a);
    const ControlRun b = replay_pulses(open, pulses);
    ASSERT_EQ(b.steps.size(), a.steps.size());
    for (std::size_t s = 0; s < a.steps.size(); ++s) {
      for (std::size_t k = 0; k < kNumComponents; ++k) {
        EXPECT_NEAR(a.steps[s].controlled[k], b.steps[s].controlled[k], 1e-11);
      }
    }
  }
}

TEST(Controller, OpenLoopTemplateWhenStabilized) {
  Controller closed = make_controller(figure_state(), Regime::Adiabatic, 0.0, 0.5, 40);
  const ControlRun a = run_control(closed, 40);
  ASSERT_FALSE(a.failure);
  const std::vector<PulseRecord> rec = a.pulses();
  const StabilizationReport rep = detect_stabilization(rec, 1e-6);
  std::vector<double> repeated;
  for (int c = 0; c < 5; ++c) {
    repeated.insert(repeated.end(), rep.template_pulses.begin(), rep.template_pulses.end());
  }
  Controller open = make_controller(figure_state(), Regime::Adiabatic, 0.0, 0.5, 40);
  const ControlRun b = replay_pulses(open, repeated);
  for (std::size_t s = 0; s < a.steps.size(); ++s) {
    for (std::size_t k = 0; k < kNumComponents; ++k) {
      EXPECT_NEAR(a.steps[s].controlled[k], b.steps[s].controlled[k], 1e-11);
    }
  }
}

TEST(Controller, NoisyRunsAreSeedDeterministic) {
  const DensityMatrix rho0 = tilted_state(kPi / 12.0);
  Controller a = make_controller(rho0, Regime::Adiabatic, 1.0, 0.5, 24, {.delta_I = 0.1, .seed = 5});
  Controller b = make_controller(rho0, Regime::Adiabatic, 1.0, 0.5, 24, {.delta_I = 0.1, .seed = 5});
  const ControlRun ra = run_control(a, 24);
  const ControlRun rb = run_control(b, 24);
  ASSERT_EQ(ra.steps.size(), rb.steps.size());
  for (std::size_t s = 0; s < ra.steps.size(); ++s) {
    EXPECT_EQ(ra.steps[s].pulse.applied_I, rb.steps[s].pulse.applied_I);
    EXPECT_EQ(ra.steps[s].controlled, rb.steps[s].controlled);
  }
}

TEST(Stabilization, DetectsTransientThenPeriodicTemplate) {
  std::vector<PulseRecord> rec;
  const std::array<double, 8> tmpl = {0.1, -0.2, 0.0, 0.3, 0.0, -0.1, 0.05, 0.0};
  for (int k = 0; k < 40; ++k) {
    PulseRecord p;
    p.step = k + 1;
    p.applied_I = tmpl[static_cast<std::size_t>(k % 8)] + (k < 8 ? 0.01 * (k + 1) : 0.0);
    rec.push_back(p);
  }
  const StabilizationReport rep = detect_stabilization(rec, 1e-6);
  EXPECT_EQ(rep.first_stable_cycle, 2);
  EXPECT_EQ(rep.template_pulses, tmpl);
}

TEST(Stabilization, NoDecoherenceIsStableFromFirstCycle) {
  Controller ctl = make_controller(figure_state(), Regime::Adiabatic, 0.0, 0.5, 24);
  const ControlRun run = run_control(ctl, 24);
  const StabilizationReport rep = detect_stabilization(run.pulses(), 1e-6);
  EXPECT_EQ(rep.first_stable_cycle, 1);
  for (double p : rep.template_pulses) EXPECT_LE(std::abs(p), 1e-12);
}

TEST(Stabilization, NeedsThreeCycles) {
  std::vector<PulseRecord> rec(23);
  EXPECT_THROW((void)detect_stabilization(rec, 1e-6), ValidationError);
}

TEST(Stabilization, NoisyPulsesDoNotStabilize) {
  Controller ctl = make_controller(from_pure_state({1.0, 0.0}, {0.0, 0.0}), Regime::Adiabatic, 1.0,
                                   0.5, 40, {.delta_I = 0.1, .seed = 1});
  const ControlRun run = run_control(ctl, 40);
  ASSERT_FALSE(run.failure);
  EXPECT_THROW((void)detect_stabilization(run.pulses(), 1e-6), NotStabilized);
}

TEST(Stabilization, CoherentStatesDriftUnderDecoherence) {
  // With per-component clocks a period-8 pattern needs one pulse area that
  // restores all eight components at once; for g > 0 the population and
  // coherence equations have no common root, so the pulses keep drifting.
  for (double gamma : {1.0, 0.1, 0.01}) {
    Controller ctl = make_controller(tilted_state(kPi / 12.0), Regime::Adiabatic, gamma, 0.5, 80);
    const ControlRun run = run_control(ctl, 80);
    ASSERT_FALSE(run.failure) << gamma;
    EXPECT_THROW((void)detect_stabilization(run.pulses(), 1e-6), NotStabilized) << gamma;
  }
}

TEST(Stabilization, IncoherentStateBudgetIsMonotoneInCoupling) {
  // The only decohering scenarios that do stabilize are the ones that need
  // no control at all; their budget is zero for every coupling.
  double prev = INFINITY;
  for (double gamma : {1.0, 0.1, 0.01}) {
    Controller ctl =
        make_controller(from_pure_state({1.0, 0.0}, {0.0, 0.0}), Regime::Adiabatic, gamma, 0.5, 40);
    const ControlRun run = run_control(ctl, 40);
    ASSERT_FALSE(run.failure);
    const StabilizationReport rep = detect_stabilization(run.pulses(), 1e-6);
    double budget = 0.0;
    for (double p : rep.template_pulses) budget = std::max(budget, std::abs(p));
    EXPECT_LE(budget, prev);
    prev = budget;
  }
}
