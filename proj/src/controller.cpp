// controller.cpp

#include "bangbang/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bangbang/errors.hpp"

namespace bangbang {

namespace {

// Roots whose magnitudes differ by less than this count as a tie.
constexpr double kTieTolerance = 1e-9;
constexpr int kGoldenIterations = 80;

struct Candidate {
  double I;
  double residual;
  std::pair<double, double> bracket;
};

template <class F>
Candidate refine_bracket(const F& f, double a, double fa, double b, double fb,
                         const SolverConfig& cfg) {
  // False position with a forced bisection whenever the bracket fails to halve.
  bool bisect_next = false;
  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    const double width = b - a;
    double x = bisect_next ? 0.5 * (a + b) : b - fb * (b - a) / (fb - fa);
    if (!(x > a && x < b)) x = 0.5 * (a + b);
    const double fx = f(x);
    if (std::abs(fx) <= cfg.root_tol) return {x, fx, {a, b}};
    if ((fa < 0.0) == (fx < 0.0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
    bisect_next = (b - a) > 0.5 * width;
    if (b - a <= 0.0 || (x == a && x == b)) break;
  }
  std::ostringstream msg;
  msg.precision(17);
  msg << "root refinement did not reach residual " << cfg.root_tol << " within " << cfg.max_iter
      << " iterations (bracket [" << a << ", " << b << "])";
  throw NonConvergence(msg.str());
}

// Golden-section search for a minimum of |f| on [a, b]; catches tangential roots.
template <class F>
std::pair<double, double> minimize_abs(const F& f, double a, double b) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = std::abs(f(c));
  double fd = std::abs(f(d));
  for (int i = 0; i < kGoldenIterations; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = std::abs(f(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = std::abs(f(d));
    }
  }
  const double x = fc < fd ? c : d;
  return {x, f(x)};
}

bool closer_to_zero(double x, double y) {
  const double ax = std::abs(x);
  const double ay = std::abs(y);
  if (std::abs(ax - ay) <= kTieTolerance) return x < y;
  return ax < ay;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(interval_halfwidth > 0.0) || !(root_tol > 0.0) || max_iter < 1 || scan_intervals < 2) {
    throw ValidationError(
        "solver config requires interval_halfwidth > 0, root_tol > 0, max_iter >= 1, "
        "scan_intervals >= 2");
  }
}

RootSolution find_pulse(const ComponentResponse& response, double pulse_sum, double target,
                        const SolverConfig& cfg) {
  auto f = [&](double I) { return response(pulse_sum + I) - target; };

  const int n = cfg.scan_intervals;
  const double lo = -cfg.interval_halfwidth;
  const double span = 2.0 * cfg.interval_halfwidth;
  std::vector<double> xs(static_cast<std::size_t>(n) + 1);
  std::vector<double> fs(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    xs[k] = (k == static_cast<std::size_t>(n)) ? cfg.interval_halfwidth
                                               : lo + static_cast<double>(k) * span / n;
    fs[k] = f(xs[k]);
  }

  const auto [fmin, fmax] = std::minmax_element(fs.begin(), fs.end());
  if (*fmax - *fmin <= cfg.root_tol) {
    const double f0 = f(0.0);
    if (std::abs(f0) <= cfg.root_tol) return {0.0, f0, {lo, cfg.interval_halfwidth}};
    std::ostringstream msg;
    msg.precision(17);
    msg << "response of " << component_label(response.component())
        << " is constant in I at " << f0 + target << " but target is " << target;
    throw NoRootInInterval(msg.str());
  }

  std::vector<Candidate> roots;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (std::abs(fs[k]) <= cfg.root_tol) roots.push_back({xs[k], fs[k], {xs[k], xs[k]}});
  }
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const double fa = fs[k];
    const double fb = fs[k + 1];
    if (std::abs(fa) <= cfg.root_tol || std::abs(fb) <= cfg.root_tol) continue;
    if ((fa < 0.0) != (fb < 0.0)) {
      roots.push_back(refine_bracket(f, xs[k], fa, xs[k + 1], fb, cfg));
    }
  }
  // Tangential roots: |f| has a local minimum at an interior grid point with
  // no sign change on either side.
  for (std::size_t k = 1; k + 1 < xs.size(); ++k) {
    const double fl = fs[k - 1], fc = fs[k], fr = fs[k + 1];
    if (std::abs(fc) <= cfg.root_tol) continue;
    const bool same_sign = ((fl < 0.0) == (fc < 0.0)) && ((fr < 0.0) == (fc < 0.0));
    if (!same_sign || std::abs(fc) > std::abs(fl) || std::abs(fc) > std::abs(fr)) continue;
    const auto [x, fx] = minimize_abs(f, xs[k - 1], xs[k + 1]);
    if (std::abs(fx) <= cfg.root_tol) roots.push_back({x, fx, {xs[k - 1], xs[k + 1]}});
  }

  if (roots.empty()) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "no solution for " << component_label(response.component()) << " = " << target
        << " with I in [" << lo << ", " << cfg.interval_halfwidth << "]; response spans ["
        << *fmin + target << ", " << *fmax + target << "]";
    throw NoRootInInterval(msg.str());
  }
  const auto best = std::min_element(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
    return closer_to_zero(a.I, b.I);
  });
  return {best->I, best->residual, best->bracket};
}

double solve_pulse(Component idx, const DensityMatrix& rho0, double g_since_reset,
                   double pulse_sum, double target, const SolverConfig& cfg, Regime regime,
                   EvolutionOptions opts) {
  return find_pulse(component_response(idx, rho0, g_since_reset, regime, opts), pulse_sum, target,
                    cfg)
      .I;
}

Controller::Controller(DensityMatrix initial, Regime regime, KernelTable kernel, double step_T,
                       SolverConfig solver, NoiseConfig noise, EvolutionOptions opts)
    : initial_(initial),
      regime_(regime),
      kernel_(std::move(kernel)),
      solver_(solver),
      opts_(opts),
      noise_(noise) {
  solver_.validate();
  if (!(step_T > 0.0)) throw ValidationError("step_T must be > 0");
  if (kernel_.size() == 0) throw ValidationError("kernel table is empty");
  ledger_.step_T = step_T;
}

double Controller::component_value(Component c, int age_steps, double pulse_sum) const {
  const double g = kernel_.at(static_cast<std::size_t>(age_steps));
  return evolve(regime_, {initial_, g, pulse_sum}, opts_).component(c);
}

StepOutcome Controller::step() {
  const Component target_component = ledger_.next_component();
  const ComponentClock& clock = ledger_.clock(target_component);
  const int age = clock.age_steps + 1;
  const double target = initial_.component(target_component);

  RootSolution sol;
  try {
    const double g = kernel_.at(static_cast<std::size_t>(age));
    sol = find_pulse(component_response(target_component, initial_, g, regime_, opts_),
                     clock.planned_sum, target, solver_);
  } catch (const Error& e) {
    std::ostringstream ctx;
    ctx.precision(17);
    ctx << e.what() << " [step " << ledger_.step + 1 << ", component "
        << component_label(target_component) << ", age " << age << " steps, g "
        << (static_cast<std::size_t>(age) < kernel_.size() ? kernel_.at(age) : NAN)
        << ", pulse_sum " << clock.planned_sum << "]";
    if (dynamic_cast<const NoRootInInterval*>(&e)) throw NoRootInInterval(ctx.str());
    if (dynamic_cast<const NonConvergence*>(&e)) throw NonConvergence(ctx.str());
    throw DomainError(ctx.str());
  }
  const double applied = noise_.perturb(sol.I);
  return advance(sol.I, applied, sol.residual, sol.bracket);
}

StepOutcome Controller::apply(double pulse) {
  const Component c = ledger_.next_component();
  const ComponentClock& clock = ledger_.clock(c);
  const double residual =
      component_value(c, clock.age_steps + 1, clock.planned_sum + pulse) - initial_.component(c);
  return advance(pulse, pulse, residual, {pulse, pulse});
}

StepOutcome Controller::advance(double solved, double applied, double residual,
                                std::pair<double, double> bracket) {
  const Component restored = ledger_.next_component();
  for (auto& clock : ledger_.clocks) {
    clock.age_steps += 1;
    clock.planned_sum += solved;
    clock.applied_sum += applied;
  }
  ledger_.step += 1;

  StepOutcome out;
  out.pulse = {ledger_.step, restored, solved, applied, residual, bracket};
  out.clocks = ledger_.clocks;
  for (std::size_t k = 0; k < kNumComponents; ++k) {
    const ComponentClock& clock = ledger_.clocks[k];
    out.controlled[k] = component_value(kComponentOrder[k], clock.age_steps, clock.applied_sum);
  }
  ledger_.clocks[index_of(restored)] = ComponentClock{};
  return out;
}

std::vector<PulseRecord> ControlRun::pulses() const {
  std::vector<PulseRecord> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.pulse);
  return out;
}

ControlRun run_control(Controller& controller, int num_steps) {
  ControlRun run;
  run.steps.reserve(static_cast<std::size_t>(std::max(num_steps, 0)));
  for (int k = 0; k < num_steps; ++k) {
    try {
      run.steps.push_back(controller.step());
    } catch (const Error& e) {
      run.failure = RunFailure{controller.ledger().step + 1, e.kind(), e.what()};
      break;
    }
  }
  return run;
}

ControlRun replay_pulses(Controller& controller, std::span<const double> pulses) {
  ControlRun run;
  run.steps.reserve(pulses.size());
  for (double p : pulses) run.steps.push_back(controller.apply(p));
  return run;
}

StabilizationReport detect_stabilization(std::span<const PulseRecord> pulses, double tol) {
  constexpr std::size_t kCycle = kNumComponents;
  const std::size_t full_cycles = pulses.size() / kCycle;
  if (full_cycles < 3) {
    std::ostringstream msg;
    msg << "stabilization needs at least 3 complete cycles (" << pulses.size() << " pulses given)";
    throw ValidationError(msg.str());
  }
  const std::size_t compared = full_cycles * kCycle;

  // Last index (0-based) whose step-ahead-by-8 difference exceeds tol.
  std::optional<std::size_t> last_bad;
  for (std::size_t k = 0; k + kCycle < compared; ++k) {
    if (!(std::abs(pulses[k].applied_I - pulses[k + kCycle].applied_I) <= tol)) last_bad = k;
  }
  const std::size_t first_cycle = last_bad ? *last_bad / kCycle + 2 : 1;
  if (first_cycle >= full_cycles) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "pulses not periodic to " << tol << " in any cycle before the last ("
        << full_cycles << " complete cycles)";
    throw NotStabilized(msg.str());
  }

  StabilizationReport report;
  report.first_stable_cycle = static_cast<int>(first_cycle);
  for (std::size_t k = 0; k < kCycle; ++k) {
    report.template_pulses[k] = pulses[compared - kCycle + k].applied_I;
  }
  return report;
}

}  // namespace bangbang
