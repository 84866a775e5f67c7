// bangbang_main.cpp: Command-line driver: run presets or config files and export CSV

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "bangbang/errors.hpp"
#include "bangbang/scenario.hpp"

namespace {

// Exit codes by error class.
int exit_code_for(std::string_view kind) {
  if (kind == "ValidationError") return 2;
  if (kind == "NoRootInInterval") return 3;
  if (kind == "NonConvergence") return 4;
  if (kind == "QuadratureError") return 5;
  if (kind == "IoError") return 6;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bang-bang decoherence control for a spin-boson qubit"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("presets", "List built-in scenario presets");

  auto* run = app.add_subcommand("run", "Run a scenario and write its trajectory as CSV");
  std::string preset_name;
  std::string config_path;
  auto* preset_opt = run->add_option("--preset", preset_name, "Built-in preset (fig1a..fig2d)");
  auto* config_opt = run->add_option("--config", config_path, "Config file (JSON or key = value)")
                         ->check(CLI::ExistingFile);

  // Overrides are collected as raw strings and validated by the resolver.
  bangbang::Settings overrides;
  struct Flag {
    const char* name;
    const char* key;
    const char* help;
  };
  const Flag flags[] = {
      {"--regime", "regime", "adiabatic | thermal"},
      {"--gamma", "gamma", "Decoherence strength"},
      {"--step-T", "step_T", "Time between control pulses (Rabi units)"},
      {"--num-steps", "num_steps", "Number of control steps"},
      {"--noise-delta", "noise_delta", "Std. deviation of additive pulse noise (radians)"},
      {"--seed", "seed", "Noise generator seed"},
      {"--omega-c", "omega_c", "Cutoff frequency"},
      {"--beta0", "beta0", "Dimensionless inverse temperature"},
      {"--omega12", "omega12", "Transition frequency (thermal regime)"},
      {"--dim-n", "dim_n", "Bath dimensionality n"},
      {"--initial", "initial", "Initial amplitudes c1re,c1im,c2re,c2im"},
      {"--root-tol", "root_tol", "Residual tolerance of the pulse solver"},
      {"--rel-tol", "rel_tol", "Relative tolerance of the kernel quadrature"},
  };
  std::map<std::string, std::string> raw;
  for (const Flag& f : flags) run->add_option(f.name, raw[f.key], f.help);
  bool hermitize = false;
  run->add_flag("--hermitize", hermitize, "Replace evolved states by their Hermitian part");
  std::string out_path;
  run->add_option("--out", out_path, "Output CSV path (default: stdout)");
  bool quiet = false;
  run->add_flag("--quiet", quiet, "Do not print the run summary to stderr");
  preset_opt->excludes(config_opt);

  CLI11_PARSE(app, argc, argv);

  if (*list) {
    for (const auto& name : bangbang::preset_names()) {
      const auto cfg = bangbang::preset(name);
      std::cout << name << ": " << bangbang::regime_name(cfg.regime)
                << ", gamma=" << bangbang::format_double(cfg.gamma)
                << ", T=" << bangbang::format_double(cfg.step_T)
                << ", delta_I=" << bangbang::format_double(cfg.noise.delta_I) << "\n";
    }
    return 0;
  }

  try {
    for (const Flag& f : flags) {
      if (run->get_option(f.name)->count() > 0) overrides[f.key] = raw[f.key];
    }
    if (!preset_name.empty()) overrides["preset"] = preset_name;
    if (hermitize) overrides["hermitize"] = "true";
    if (!out_path.empty()) overrides["out"] = out_path;
    if (preset_name.empty() && config_path.empty() && overrides.empty()) {
      throw bangbang::ValidationError("run needs --preset, --config or explicit fields");
    }

    std::optional<std::filesystem::path> path;
    if (!config_path.empty()) path = config_path;
    const bangbang::ScenarioConfig cfg = bangbang::load_config(path, overrides);
    const bangbang::ScenarioResult result = bangbang::run_scenario(cfg);

    if (cfg.out_path.empty()) {
      std::cout << bangbang::to_csv(result);
    } else {
      bangbang::export_csv(result, cfg.out_path);
    }
    if (!quiet) {
      std::cerr << cfg.name << ": " << result.steps.size() << "/" << cfg.num_steps
                << " steps; stabilization: " << result.stabilization_note << "\n";
    }
    if (result.failure) {
      std::cerr << result.failure->kind << " at step " << result.failure->step << ": "
                << result.failure->message << "\n";
      return exit_code_for(result.failure->kind);
    }
    return 0;
  } catch (const bangbang::Error& e) {
    std::cerr << e.kind() << ": " << e.what() << "\n";
    return exit_code_for(e.kind());
  }
}
