// scenario.cpp

#include "bangbang/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bangbang/errors.hpp"

namespace bangbang {

namespace {

struct PresetSpec {
  std::string_view name;
  Regime regime;
  double step_T;
  double delta_I;
};

// Figure panels: gamma = 1 and the initial state (i|1> + |2>)/sqrt(2) throughout.
constexpr PresetSpec kPresets[] = {
    {"fig1a", Regime::Adiabatic, 0.5, 0.0},  {"fig1b", Regime::Adiabatic, 0.5, 0.1},
    {"fig1c", Regime::Adiabatic, 2.0, 0.0},  {"fig1d", Regime::Adiabatic, 2.0, 0.1},
    {"fig2a", Regime::Thermal, 0.25, 0.0},   {"fig2b", Regime::Thermal, 0.25, 0.1},
    {"fig2c", Regime::Thermal, 1.0, 0.0},    {"fig2d", Regime::Thermal, 1.0, 0.1},
};

std::string normalize_key(std::string_view key) {
  std::string out;
  out.reserve(key.size());
  for (char ch : key) {
    if (ch == '-') ch = '_';
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  while (!out.empty() && out.front() == '_') out.erase(out.begin());
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw ValidationError(key + ": expected a finite number, got '" + std::string(text) + "'");
  }
  return value;
}

long long parse_integer(const std::string& key, std::string_view text) {
  text = trim(text);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ValidationError(key + ": expected an integer, got '" + std::string(text) + "'");
  }
  return value;
}

std::uint64_t parse_seed(const std::string& key, std::string_view text) {
  text = trim(text);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ValidationError(key + ": expected an unsigned 64-bit integer, got '" +
                          std::string(text) + "'");
  }
  return value;
}

bool parse_bool(const std::string& key, std::string_view text) {
  std::string t = normalize_key(trim(text));
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ValidationError(key + ": expected true/false, got '" + std::string(text) + "'");
}

std::pair<Complex, Complex> parse_initial(const std::string& key, std::string_view text) {
  std::vector<double> parts;
  std::string_view rest = text;
  while (true) {
    const auto comma = rest.find(',');
    parts.push_back(parse_double(key, rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (parts.size() != 4) {
    throw ValidationError(key + ": expected c1re,c1im,c2re,c2im (4 numbers), got " +
                          std::to_string(parts.size()));
  }
  return {Complex(parts[0], parts[1]), Complex(parts[2], parts[3])};
}

void require(bool ok, const std::string& field, const std::string& constraint) {
  if (!ok) throw ValidationError(field + " must be " + constraint);
}

using Setter = std::function<void(ScenarioConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"name", [](ScenarioConfig& c, const std::string&, const std::string& v) { c.name = v; }},
      {"regime", [](ScenarioConfig& c, const std::string&, const std::string& v) { c.regime = parse_regime(trim(v)); }},
      {"gamma", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.gamma = parse_double(k, v); }},
      {"dim_n", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.n = static_cast<int>(parse_integer(k, v)); }},
      {"n", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.n = static_cast<int>(parse_integer(k, v)); }},
      {"omega_c", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.omega_c = parse_double(k, v); }},
      {"beta0", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.beta0 = parse_double(k, v); }},
      {"omega12", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.omega12 = parse_double(k, v); }},
      {"step_t", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.step_T = parse_double(k, v); }},
      {"num_steps", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.num_steps = static_cast<int>(parse_integer(k, v)); }},
      {"initial", [](ScenarioConfig& c, const std::string& k, const std::string& v) { std::tie(c.c1, c.c2) = parse_initial(k, v); }},
      {"noise_delta", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.noise.delta_I = parse_double(k, v); }},
      {"seed", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.noise.seed = parse_seed(k, v); }},
      {"hermitize", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.hermitize = parse_bool(k, v); }},
      {"out", [](ScenarioConfig& c, const std::string&, const std::string& v) { c.out_path = std::string(trim(v)); }},
      {"interval_halfwidth", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.solver.interval_halfwidth = parse_double(k, v); }},
      {"root_tol", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.solver.root_tol = parse_double(k, v); }},
      {"max_iter", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.solver.max_iter = static_cast<int>(parse_integer(k, v)); }},
      {"scan_intervals", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.solver.scan_intervals = static_cast<int>(parse_integer(k, v)); }},
      {"rel_tol", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.quad.rel_tol = parse_double(k, v); }},
      {"abs_tol", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.quad.abs_tol = parse_double(k, v); }},
      {"upper_cut_multiplier", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.quad.upper_cut_multiplier = parse_double(k, v); }},
      {"singular_halfwidth", [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.quad.singular_halfwidth = parse_double(k, v); }},
  };
  return table;
}

void drop_choice(ScenarioConfig& cfg, const std::string& field) {
  std::erase(cfg.artifact_choices, field);
}

// Settings key -> name used in the artifact-choice list.
std::string choice_field(const std::string& key) {
  if (key == "dim_n") return "n";
  return key;
}

std::string format_complex_pair(Complex c1, Complex c2) {
  return format_double(c1.real()) + "," + format_double(c1.imag()) + "," +
         format_double(c2.real()) + "," + format_double(c2.imag());
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& item : items) {
    if (!out.empty()) out += ",";
    out += item;
  }
  return out.empty() ? "none" : out;
}

std::string one_line(std::string text) {
  std::replace(text.begin(), text.end(), '\n', ' ');
  std::replace(text.begin(), text.end(), '\r', ' ');
  return text;
}

std::vector<std::pair<std::string, std::string>> describe(const ScenarioConfig& cfg) {
  const auto& q = cfg.quad;
  return {
      {"scenario", cfg.name},
      {"regime", std::string(regime_name(cfg.regime))},
      {"gamma", format_double(cfg.gamma)},
      {"n", std::to_string(cfg.n)},
      {"omega_c", format_double(cfg.omega_c)},
      {"beta0", format_double(cfg.beta0)},
      {"omega12", format_double(cfg.omega12)},
      {"step_T", format_double(cfg.step_T)},
      {"num_steps", std::to_string(cfg.num_steps)},
      {"initial", format_complex_pair(cfg.c1, cfg.c2)},
      {"noise_delta", format_double(cfg.noise.delta_I)},
      {"seed", std::to_string(cfg.noise.seed)},
      {"generator", std::string(kNoiseGeneratorName)},
      {"hermitize", cfg.hermitize ? "true" : "false"},
      {"solver", "scan " + std::to_string(cfg.solver.scan_intervals) + " subintervals of [-" +
                     format_double(cfg.solver.interval_halfwidth) + "," +
                     format_double(cfg.solver.interval_halfwidth) + "], root_tol " +
                     format_double(cfg.solver.root_tol) + ", max_iter " +
                     std::to_string(cfg.solver.max_iter) + ", smallest |I|"},
      {"quadrature", "gauss-kronrod-15 panels, rel_tol " + format_double(q.rel_tol) +
                         ", abs_tol " + format_double(q.abs_tol) + ", upper cut " +
                         format_double(q.upper_cut_multiplier) + "*omega_c, singular halfwidth " +
                         format_double(q.resolved_halfwidth(cfg.omega12))},
      {"artifact_choices", join(cfg.artifact_choices)},
  };
}

}  // namespace

ModelParams ScenarioConfig::model() const {
  return ModelParams{regime, gamma, n, omega_c, beta0, omega12};
}

void ScenarioConfig::validate() const {
  model().validate();
  require(std::isfinite(step_T) && step_T > 0.0, "step_T", "finite and > 0");
  require(num_steps >= 1, "num_steps", ">= 1");
  noise.validate();
  solver.validate();
  quad.validate();
  from_pure_state(c1, c2);  // throws on non-normalized amplitudes
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& p : kPresets) out.emplace_back(p.name);
  return out;
}

ScenarioConfig preset(std::string_view name) {
  const std::string key = normalize_key(name);
  for (const auto& p : kPresets) {
    if (p.name != key) continue;
    ScenarioConfig cfg;
    cfg.name = std::string(p.name);
    cfg.regime = p.regime;
    cfg.gamma = 1.0;
    cfg.step_T = p.step_T;
    cfg.noise.delta_I = p.delta_I;
    cfg.artifact_choices = {"n", "omega_c", "beta0", "omega12", "num_steps", "seed"};
    return cfg;
  }
  throw ValidationError("unknown preset '" + std::string(name) + "' (known: " +
                        join(preset_names()) + ")");
}

ScenarioConfig resolve_config(const Settings& settings) {
  Settings normalized;
  for (const auto& [k, v] : settings) normalized[normalize_key(k)] = v;

  ScenarioConfig cfg;
  if (auto it = normalized.find("preset"); it != normalized.end()) {
    cfg = preset(trim(it->second));
    normalized.erase(it);
  } else {
    for (const char* required : {"regime", "gamma", "step_t"}) {
      if (!normalized.contains(required)) {
        throw ValidationError(std::string("missing required field '") + required +
                              "' (no preset given, so it has no default)");
      }
    }
    cfg.artifact_choices = {"n", "omega_c", "beta0", "omega12", "num_steps", "seed"};
  }

  const auto& table = setters();
  for (const auto& [key, value] : normalized) {
    const auto it = table.find(key);
    if (it == table.end()) throw ValidationError("unknown config field '" + key + "'");
    it->second(cfg, key, value);
    drop_choice(cfg, choice_field(key));
  }
  cfg.validate();
  return cfg;
}

Settings parse_settings(std::string_view text) {
  Settings out;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("config JSON parse error: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("config JSON must be an object");
    for (const auto& [key, value] : doc.items()) {
      if (value.is_string()) {
        out[key] = value.get<std::string>();
      } else if (value.is_boolean()) {
        out[key] = value.get<bool>() ? "true" : "false";
      } else if (value.is_number_integer() || value.is_number_unsigned()) {
        out[key] = value.dump();
      } else if (value.is_number()) {
        out[key] = format_double(value.get<double>());
      } else if (value.is_array()) {
        std::string joined;
        for (const auto& item : value) {
          if (!item.is_number()) throw ValidationError(key + ": array entries must be numbers");
          if (!joined.empty()) joined += ",";
          joined += format_double(item.get<double>());
        }
        out[key] = joined;
      } else {
        throw ValidationError(key + ": unsupported JSON value type");
      }
    }
    return out;
  }

  std::size_t line_no = 0;
  std::istringstream lines{std::string(text)};
  for (std::string line; std::getline(lines, line);) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;
    auto sep = view.find('=');
    if (sep == std::string_view::npos) sep = view.find(':');
    if (sep == std::string_view::npos) {
      throw ValidationError("config line " + std::to_string(line_no) +
                            ": expected 'key = value'");
    }
    out[std::string(trim(view.substr(0, sep)))] = std::string(trim(view.substr(sep + 1)));
  }
  return out;
}

Settings read_settings_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_settings(buffer.str());
}

ScenarioConfig load_config(const std::optional<std::filesystem::path>& path,
                           const Settings& overrides) {
  Settings merged;
  if (path) merged = read_settings_file(*path);
  Settings normalized;
  for (const auto& [k, v] : merged) normalized[normalize_key(k)] = v;
  for (const auto& [k, v] : overrides) normalized[normalize_key(k)] = v;
  return resolve_config(normalized);
}

std::vector<double> Trajectory::series(Component c, double TrajectoryRow::*column) const {
  std::vector<double> out;
  for (const auto& row : rows) {
    if (row.component == c) out.push_back(row.*column);
  }
  return out;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  ScenarioResult result;
  result.config = cfg;

  const DensityMatrix initial = from_pure_state(cfg.c1, cfg.c2);
  KernelTable table = KernelTable::uniform(cfg.step_T, cfg.num_steps, cfg.model(), cfg.quad);
  result.kernel.assign(table.values().begin(), table.values().end());

  Controller controller(initial, cfg.regime, std::move(table), cfg.step_T, cfg.solver, cfg.noise,
                        EvolutionOptions{cfg.hermitize});
  ControlRun run = run_control(controller, cfg.num_steps);
  result.failure = run.failure;
  result.pulses = run.pulses();

  const auto unitary = initial.components();
  result.trajectory.rows.reserve(run.steps.size() * kNumComponents);
  for (const StepOutcome& s : run.steps) {
    const int step = s.pulse.step;
    const double tau = static_cast<double>(step) * cfg.step_T;
    const DensityMatrix decohered =
        zero_control(cfg.regime, initial, result.kernel[static_cast<std::size_t>(step)]);
    for (std::size_t k = 0; k < kNumComponents; ++k) {
      result.trajectory.rows.push_back({step, tau, kComponentOrder[k], unitary[k],
                                        decohered.component(kComponentOrder[k]),
                                        s.controlled[k], s.pulse.solved_I, s.pulse.applied_I});
    }
  }
  result.steps = std::move(run.steps);

  if (result.failure) {
    result.stabilization_note = "n/a (run aborted)";
  } else if (result.pulses.size() < 3 * kNumComponents) {
    result.stabilization_note = "n/a (fewer than 3 cycles)";
  } else {
    try {
      result.stabilization = detect_stabilization(result.pulses, kStabilizationTolerance);
      std::string note = "cycle " + std::to_string(result.stabilization->first_stable_cycle) +
                         " at tol " + format_double(kStabilizationTolerance) + "; template ";
      for (std::size_t k = 0; k < kNumComponents; ++k) {
        note += (k ? "," : "") + format_double(result.stabilization->template_pulses[k]);
      }
      result.stabilization_note = note;
    } catch (const NotStabilized&) {
      result.stabilization_note =
          "not stabilized at tol " + format_double(kStabilizationTolerance);
    }
  }

  result.metadata = describe(cfg);
  result.metadata.emplace_back("status", result.failure ? "aborted" : "completed");
  result.metadata.emplace_back("stabilization", result.stabilization_note);
  return result;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

std::string to_csv(const ScenarioResult& result) {
  std::string out;
  for (const auto& [key, value] : result.metadata) {
    out += "# " + key + ": " + one_line(value) + "\n";
  }
  out += kCsvHeader;
  out += "\n";
  for (const auto& row : result.trajectory.rows) {
    out += std::to_string(row.step);
    out += ',';
    out += format_double(row.tau);
    out += ',';
    out += component_label(row.component);
    for (double v : {row.unitary, row.uncontrolled, row.controlled, row.solved_I, row.applied_I}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  if (result.failure) {
    out += "# aborted at step " + std::to_string(result.failure->step) + ": " +
           result.failure->kind + ": " + one_line(result.failure->message) + "\n";
  }
  return out;
}

void export_csv(const ScenarioResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  const std::string text = to_csv(result);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace bangbang
