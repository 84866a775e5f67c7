#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bangbang/errors.hpp"
#include "bangbang/scenario.hpp"

using namespace bangbang;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> out;
  bool after_header = false;
  for (const auto& line : lines(text)) {
    if (line.starts_with("#")) continue;
    if (after_header) out.push_back(line);
    after_header |= line == kCsvHeader;
  }
  return out;
}

std::string header_line(const std::string& text) {
  for (const auto& line : lines(text)) {
    if (!line.starts_with("#")) return line;
  }
  return {};
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("bangbang_scenario_test_" + name);
}

}  // namespace

TEST(Presets, FigureParameters) {
  EXPECT_EQ(preset_names().size(), 8u);
  const ScenarioConfig a = preset("fig1a");
  EXPECT_EQ(a.regime, Regime::Adiabatic);
  EXPECT_EQ(a.gamma, 1.0);
  EXPECT_EQ(a.step_T, 0.5);
  EXPECT_EQ(a.noise.delta_I, 0.0);
  const ScenarioConfig d = preset("fig2d");
  EXPECT_EQ(d.regime, Regime::Thermal);
  EXPECT_EQ(d.step_T, 1.0);
  EXPECT_EQ(d.noise.delta_I, 0.1);
  EXPECT_EQ(preset("fig1c").step_T, 2.0);
  EXPECT_EQ(preset("fig2b").step_T, 0.25);
  EXPECT_THROW((void)preset("fig3a"), ValidationError);
}

TEST(Config, MissingCouplingIsRejected) {
  try {
    (void)resolve_config({{"regime", "adiabatic"}, {"step_T", "0.5"}});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("gamma"), std::string::npos) << e.what();
  }
}

TEST(Config, UnknownKeyAndBadValuesAreRejected) {
  EXPECT_THROW((void)resolve_config({{"preset", "fig1a"}, {"colour", "red"}}), ValidationError);
  EXPECT_THROW((void)resolve_config({{"preset", "fig1a"}, {"gamma", "abc"}}), ValidationError);
  EXPECT_THROW((void)resolve_config({{"preset", "fig1a"}, {"step_T", "-1"}}), ValidationError);
  EXPECT_THROW((void)resolve_config({{"preset", "fig1a"}, {"initial", "1,0,1,0"}}),
               ValidationError);
}

TEST(Config, OverridesApplyOnTopOfPreset) {
  const ScenarioConfig cfg =
      resolve_config({{"preset", "fig2a"}, {"gamma", "0.25"}, {"num-steps", "16"}});
  EXPECT_EQ(cfg.regime, Regime::Thermal);
  EXPECT_EQ(cfg.gamma, 0.25);
  EXPECT_EQ(cfg.num_steps, 16);
  EXPECT_EQ(cfg.step_T, 0.25);
}

TEST(Config, ParsesJsonAndKeyValueText) {
  const Settings json = parse_settings(R"({"regime": "thermal", "gamma": 0.5, "step_T": 1,
                                           "initial": [1, 0, 0, 0], "hermitize": true})");
  const ScenarioConfig a = resolve_config(json);
  EXPECT_EQ(a.regime, Regime::Thermal);
  EXPECT_EQ(a.gamma, 0.5);
  EXPECT_TRUE(a.hermitize);
  EXPECT_EQ(a.c1, Complex(1.0, 0.0));

  const Settings flat = parse_settings("# test\nregime = adiabatic\ngamma: 2\nstep_T = 0.1\n\n");
  const ScenarioConfig b = resolve_config(flat);
  EXPECT_EQ(b.gamma, 2.0);
  EXPECT_EQ(b.step_T, 0.1);
}

TEST(Config, FileAndOverridesCombine) {
  const auto path = temp_path("cfg.json");
  {
    std::ofstream out(path);
    out << R"({"preset": "fig1b", "seed": 9})";
  }
  const ScenarioConfig cfg = load_config(path, {{"seed", "11"}});
  EXPECT_EQ(cfg.noise.seed, 11u);
  EXPECT_EQ(cfg.noise.delta_I, 0.1);
  std::filesystem::remove(path);
  EXPECT_THROW((void)load_config(temp_path("missing.json")), IoError);
}

TEST(Scenario, NoDecoherencePresetKeepsUnitaryValues) {
  ScenarioConfig cfg = preset("fig1a");
  cfg.gamma = 0.0;
  cfg.num_steps = 32;
  const ScenarioResult r = run_scenario(cfg);
  ASSERT_TRUE(r.completed());
  ASSERT_EQ(r.trajectory.rows.size(), 32u * 8u);
  for (const auto& row : r.trajectory.rows) {
    EXPECT_EQ(row.controlled, row.unitary);
    EXPECT_EQ(row.uncontrolled, row.unitary);
    EXPECT_EQ(row.tau, row.step * 0.5);
  }
  ASSERT_TRUE(r.stabilization);
  EXPECT_EQ(r.stabilization->first_stable_cycle, 1);
}

TEST(Scenario, OneStepGivesEightRows) {
  ScenarioConfig cfg = preset("fig1a");
  cfg.gamma = 0.0;
  cfg.num_steps = 1;
  const ScenarioResult r = run_scenario(cfg);
  const std::vector<std::string> rows = data_lines(to_csv(r));
  ASSERT_EQ(rows.size(), 8u);
  EXPECT_EQ(rows[0], "1,0.5,rho11R,0.5,0.5,0.5,0,0");
  EXPECT_TRUE(rows[7].starts_with("1,0.5,rho22I,"));
}

TEST(Scenario, UncontrolledColumnIsPureDephasing) {
  ScenarioConfig cfg = preset("fig1a");
  cfg.num_steps = 8;
  const ScenarioResult r = run_scenario(cfg);
  ASSERT_FALSE(r.completed());
  const auto im = r.trajectory.series(Component::Rho12I, &TrajectoryRow::uncontrolled);
  ASSERT_EQ(im.size(), 3u);
  for (std::size_t k = 0; k < im.size(); ++k) {
    const double g = g_adiabatic(0.5 * static_cast<double>(k + 1), cfg.model());
    EXPECT_NEAR(im[k], 0.5 * std::exp(-g), 1e-15);
  }
}

TEST(Scenario, AbortedRunKeepsPartialTrajectoryAndMarker) {
  const ScenarioResult r = run_scenario(preset("fig1a"));
  ASSERT_TRUE(r.failure);
  EXPECT_EQ(r.failure->step, 4);
  EXPECT_EQ(r.trajectory.rows.size(), 24u);
  const std::vector<std::string> all = lines(to_csv(r));
  EXPECT_TRUE(all.back().starts_with("# aborted at step 4: NoRootInInterval: ")) << all.back();
}

TEST(Csv, EmptyTrajectoryIsHeaderAndMetadataOnly) {
  ScenarioResult r;
  r.metadata = {{"scenario", "empty"}};
  EXPECT_EQ(to_csv(r), "# scenario: empty\n" + std::string(kCsvHeader) + "\n");
}

TEST(Csv, HeaderAndMetadata) {
  ScenarioConfig cfg = preset("fig2a");
  cfg.num_steps = 1;
  const ScenarioResult r = run_scenario(cfg);
  const std::string text = to_csv(r);
  EXPECT_EQ(header_line(text), kCsvHeader);
  EXPECT_EQ(data_lines(text).size(), 8u);
  EXPECT_NE(text.find("# regime: thermal\n"), std::string::npos);
  EXPECT_NE(text.find("# seed: 1\n"), std::string::npos);
  EXPECT_NE(text.find("# generator: "), std::string::npos);
}

TEST(Csv, ShortestRoundTripNumbers) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(0.0), "0");
  EXPECT_EQ(format_double(-2.5), "-2.5");
  for (double x : {1.0 / 3.0, 1e-300, 6.02214076e23, -0.30773985706233514}) {
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
}

TEST(Csv, ExportIsByteIdenticalAcrossRuns) {
  ScenarioConfig cfg = preset("fig1b");
  cfg.c1 = {0.0, std::cos(0.2617993877991494)};
  cfg.c2 = {std::sin(0.2617993877991494), 0.0};
  cfg.num_steps = 24;
  const auto p1 = temp_path("a.csv");
  const auto p2 = temp_path("b.csv");
  export_csv(run_scenario(cfg), p1);
  export_csv(run_scenario(cfg), p2);
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const std::string a = slurp(p1);
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(p2));
  std::filesystem::remove(p1);
  std::filesystem::remove(p2);
}

TEST(Csv, UnwritablePathIsIoError) {
  ScenarioConfig cfg = preset("fig1a");
  cfg.num_steps = 1;
  EXPECT_THROW(export_csv(run_scenario(cfg), "/nonexistent-dir/out.csv"), IoError);
}
