#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "survode/events.hpp"
#include "survode/hazard.hpp"
#include "survode/io.hpp"
#include "survode/params.hpp"
#include "survode/simulation.hpp"
#include "survode/testing.hpp"

namespace survode {

/// One parameter to estimate or test, possibly with a custom hazard schema.
struct Analysis {
  std::string name;
  ParameterSpec spec;
  std::vector<std::size_t> indices;
  Covariation covariation = Covariation::kJumpProducts;
};

struct RunConfig {
  // Data.
  std::string data_path;
  CsvSchema csv;
  std::vector<Transition> transitions;  // empty: observed plus required
  std::vector<std::string> groups;      // empty: labels in order of appearance

  // estimate / test.
  std::vector<Analysis> analyses;
  std::vector<double> times;
  double level = 0.05;
  std::optional<Eigen::VectorXd> z0;
  RankPolicy rank_policy = RankPolicy::kSkip;

  // simulate / power.
  std::string scenario_parameter = "survival";
  HazardScenario scenario;
  std::optional<double> kappa;  // simulate: calibrate group 2 first
  std::size_t simulate_n = 250;
  double simulate_censoring = 0.10;
  std::vector<double> kappas;
  std::vector<TestKind> tests = {TestKind::kPlugin};
  PowerSettings power;

  std::uint64_t seed = 1;
  std::string output;
  std::string summary;
};

/// Builds a config from JSON; relative paths resolve against `base_dir`.
/// Throws UsageError on unknown keys, wrong types or invalid values.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json load_config_json(const std::string& path);

/// The transition schema used to count `log` under `cfg`.
std::vector<Transition> resolve_transitions(const RunConfig& cfg, const EventLog& log);
/// The two (test) or more (estimate) group labels.
std::vector<std::string> resolve_groups(const RunConfig& cfg, const EventLog& log);

/// Hazards for one analysis: Nelson-Aalen, or the additive model at z0.
HazardPath analysis_hazards(const RunConfig& cfg, const Analysis& analysis, const CountingSystem& cs);

struct TestRow {
  std::string analysis;
  std::string parameter;
  TestResult result;
};

std::vector<TestRow> run_tests(const RunConfig& cfg, const EventLog& log);
Table test_table(const std::vector<TestRow>& rows, const std::vector<std::string>& groups);
/// Fixed-width summary; estimates and p-values to 2 decimals (p < 0.005 shows as 0).
std::string test_summary(const std::vector<TestRow>& rows, const std::vector<std::string>& groups);

/// Columns: analysis, group, time, component, estimate, lower, upper.
Table estimate_table(const RunConfig& cfg, const EventLog& log);

/// Both groups of the scenario with censoring applied.
EventLog simulate_log(const RunConfig& cfg);
CsvSchema simulation_csv_schema(StateModel model);

PowerCurve run_power(const RunConfig& cfg);
Table power_table(const PowerCurve& curve);

/// Drive a subcommand end to end, writing to cfg.output (stdout when empty).
void run_estimate(const RunConfig& cfg);
void run_test(const RunConfig& cfg);
void run_simulate(const RunConfig& cfg);
void run_power_command(const RunConfig& cfg);

}  // namespace survode
