// scenario.hpp: Scenario configuration, presets, trajectory assembly and CSV export

#pragma once

#include <filesystem>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bangbang/controller.hpp"
#include "bangbang/kernels.hpp"
#include "bangbang/noise.hpp"
#include "bangbang/state.hpp"

namespace bangbang {

struct ScenarioConfig {
  std::string name = "custom";
  Regime regime = Regime::Adiabatic;
  double gamma = 0.0;
  int n = 3;
  double omega_c = 10.0;
  double beta0 = 1.0;
  double omega12 = 1.0;
  double step_T = 0.5;
  int num_steps = 80;
  Complex c1{0.0, 1.0 / std::numbers::sqrt2};
  Complex c2{1.0 / std::numbers::sqrt2, 0.0};
  NoiseConfig noise;
  SolverConfig solver;
  QuadratureConfig quad;
  bool hermitize = false;
  std::string out_path;
  // Fields whose values are artifact choices rather than figure parameters.
  std::vector<std::string> artifact_choices;

  ModelParams model() const;
  void validate() const;
};

// Flat key -> value settings, as read from flags or a config file.
using Settings = std::map<std::string, std::string>;

std::vector<std::string> preset_names();
// Throws ValidationError for unknown names.
ScenarioConfig preset(std::string_view name);

// Builds a fully validated config: starts from settings["preset"] when
// present, then applies every other key. Without a preset, regime, gamma and
// step_T are required. Unknown keys are rejected.
ScenarioConfig resolve_config(const Settings& settings);

// Reads a JSON object or flat "key = value" lines ('#' starts a comment).
Settings read_settings_file(const std::filesystem::path& path);
Settings parse_settings(std::string_view text);

// Combined: file settings first, then `overrides`.
ScenarioConfig load_config(const std::optional<std::filesystem::path>& path,
                           const Settings& overrides = {});

struct TrajectoryRow {
  int step = 0;
  double tau = 0.0;
  Component component = Component::Rho11R;
  double unitary = 0.0;
  double uncontrolled = 0.0;
  double controlled = 0.0;
  double solved_I = 0.0;
  double applied_I = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryRow> rows;  // ordered by (step, component)

  std::vector<double> series(Component c, double TrajectoryRow::*column) const;
};

struct ScenarioResult {
  ScenarioConfig config;
  Trajectory trajectory;
  std::vector<PulseRecord> pulses;
  std::vector<StepOutcome> steps;
  std::vector<double> kernel;  // g(k T), k = 0..num_steps
  std::optional<StabilizationReport> stabilization;
  std::string stabilization_note;
  std::optional<RunFailure> failure;
  std::vector<std::pair<std::string, std::string>> metadata;

  bool completed() const noexcept { return !failure.has_value(); }
};

inline constexpr double kStabilizationTolerance = 1e-6;

ScenarioResult run_scenario(const ScenarioConfig& cfg);

inline constexpr std::string_view kCsvHeader =
    "step,tau,component,unitary,uncontrolled,controlled,solved_I,applied_I";

// Shortest round-trip decimal.
std::string format_double(double value);

std::string to_csv(const ScenarioResult& result);
// Throws IoError naming the path.
void export_csv(const ScenarioResult& result, const std::filesystem::path& path);

}  // namespace bangbang
