#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "survode/events.hpp"
#include "survode/hazard.hpp"
#include "survode/params.hpp"
#include "survode/testing.hpp"

namespace survode {

// Random numbers --------------------------------------------------------------

/// SplitMix64 mixing of (seed, stream) into an independent seed. Replication r
/// of a study seeded with s always uses derive_seed(s, r), whatever the thread
/// layout.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(derive_seed(seed, 0x5eed)) {}

  /// Uniform on the open interval (0, 1).
  double uniform();
  double exponential() { return -std::log(uniform()); }
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

// Hazard scenarios --------------------------------------------------------------

enum class HazardShape { kConstant, kCrossing, kDeviating };

std::string to_string(HazardShape shape);
HazardShape parse_shape(const std::string& name);

/// Piecewise-linear hazard rate:
///   constant   h(t) = level
///   crossing   h(t) = level + slope (t - changepoint)      (a line through (changepoint, level))
///   deviating  h(t) = level + slope max(0, t - changepoint)
struct LinearHazard {
  HazardShape shape = HazardShape::kConstant;
  double level = 0.0;
  double slope = 0.0;
  double changepoint = 0.0;

  double rate(double t) const;
  double cumulative(double t) const;
  /// Smallest t with cumulative(t) = target, or nullopt when that lies beyond `horizon`.
  std::optional<double> inverse_cumulative(double target, double horizon) const;
  /// Rate at 0, the changepoint and the horizon (sufficient for piecewise-linear).
  bool nonnegative_on(double horizon) const;
};

enum class StateModel {
  kSurvival,        // 0 -> 1
  kCompetingRisks,  // 0 -> 1 (cause of interest), 0 -> 2 (competing)
  kIllnessDeath,    // 0 -> 1, 0 -> 2, 1 -> 2
  kRecurrent,       // 0 -> 0 (recurrent event), 0 -> 1 (death)
};

std::string to_string(StateModel model);
StateModel parse_model(const std::string& name);

/// Hazards of one group. `primary` drives the transition the scenario varies:
/// death (survival), the cause of interest (competing risks), illness
/// (illness-death) or the recurrent event (recurrent). `secondary` is the
/// constant competing / 0->2 / death rate and `tertiary` the 1->2 rate.
struct GroupHazards {
  LinearHazard primary;
  double secondary = 0.0;
  double tertiary = 0.0;
};

enum class FreeCoefficient { kLevel, kSlope };

struct HazardScenario {
  StateModel model = StateModel::kSurvival;
  GroupHazards group1;
  GroupHazards group2;
  double horizon = 1.5;
  /// Coefficient of group 2's primary hazard adjusted by calibrate_kappa.
  FreeCoefficient free = FreeCoefficient::kLevel;

  HazardShape shape() const { return group1.primary.shape; }
  const GroupHazards& group(int g) const;
  std::vector<Transition> transitions() const;
  /// Exact cumulative hazard of `t` in group g.
  double cumulative(int g, const Transition& tr, double time) const;
  /// The transitions compared by the log-rank and Greenwood comparators.
  std::vector<std::size_t> primary_transitions() const;
  void validate() const;
};

/// Reconstructed default scenarios: group 2 equals group 1 (kappa = 0), group 1
/// has event probability about 0.35 by t = 1.5.
HazardScenario default_scenario(const std::string& parameter, HazardShape shape);

/// Scenario with group 2's primary slope set to `ratio` times group 1's and
/// the level left free, for studies where X1(t0) = X2(t0) is calibrated.
HazardScenario slope_ratio_scenario(HazardScenario base, double ratio);

// Sampling ------------------------------------------------------------------------

/// n subjects of group g (1 or 2), administratively censored at the horizon.
EventLog sample_event_times(const HazardScenario& scenario, int group, std::size_t n, std::uint64_t seed);

/// Censors floor(fraction * n) randomly chosen subjects at a time uniform on
/// (0, end of their follow-up). The count is exact, but the censoring time
/// depends on the event time.
EventLog apply_censoring(EventLog records, double fraction, std::uint64_t seed);

/// floor(fraction * n) randomly chosen subjects draw a censoring time uniform
/// on (0, horizon), independent of their history; it takes effect when it
/// precedes the end of follow-up.
EventLog apply_independent_censoring(EventLog records, double fraction, double horizon, std::uint64_t seed);

enum class CensoringScheme { kIndependent, kBeforeEvent };

std::string to_string(CensoringScheme scheme);
CensoringScheme parse_censoring_scheme(const std::string& name);

/// Both groups of a scenario, censored, as simulated in one power replication.
std::pair<EventLog, EventLog> simulate_groups(const HazardScenario& scenario, std::size_t n_per_group,
                                              double censoring, CensoringScheme scheme, std::uint64_t seed);

// Calibration -------------------------------------------------------------------

inline constexpr std::size_t kCalibrationSteps = 10000;
inline constexpr double kCalibrationTolerance = 1e-8;

/// X(t0) of group g from the scenario's exact cumulative hazards on a uniform
/// Euler mesh.
Eigen::VectorXd true_parameter(const HazardScenario& scenario, int group, const ParameterSpec& spec, double t0,
                               std::size_t steps = kCalibrationSteps);

/// Sets the free coefficient of group 2 by bisection so that
/// X1(t0) - X2(t0) = kappa for the spec's first estimand.
HazardScenario calibrate_kappa(const HazardScenario& scenario_template, const ParameterSpec& spec, double t0,
                               double kappa);

/// Admissible bracket for the free coefficient (keeps the hazard nonnegative).
std::pair<double, double> free_coefficient_bracket(const HazardScenario& scenario);

// Power -------------------------------------------------------------------------

enum class TestKind { kPlugin, kLogRank, kGreenwood };

std::string to_string(TestKind kind);
TestKind parse_test(const std::string& name);

struct PowerSettings {
  double t0 = 1.5;
  std::size_t n_per_group = 250;
  std::size_t replications = 400;
  double level = 0.05;
  double censoring = 0.10;
  CensoringScheme censoring_scheme = CensoringScheme::kIndependent;
  std::uint64_t seed = 1;
  Covariation covariation = Covariation::kJumpProducts;
  /// 0 selects std::thread::hardware_concurrency().
  unsigned threads = 0;
};

struct PowerPoint {
  TestKind test = TestKind::kPlugin;
  double kappa = 0.0;
  double rate = 0.0;
  double std_error = 0.0;
  std::size_t replications = 0;
  std::size_t failures = 0;
  std::size_t n_per_group = 0;
  double level = 0.05;
  /// More than 1% of replications failed.
  bool flagged = false;
};

/// Outcome of one test in one replication; nullopt marks an estimation failure.
struct ReplicationOutcome {
  std::optional<double> statistic;
  std::optional<double> p_value;
};

struct PowerStudy {
  std::vector<TestKind> tests;
  std::vector<PowerPoint> points;  // one per test
  /// outcomes[r][i] is test i in replication r.
  std::vector<std::vector<ReplicationOutcome>> outcomes;
};

/// Runs all `tests` on the same simulated datasets.
PowerStudy run_power_study(const HazardScenario& scenario, const ParameterSpec& spec,
                           const std::vector<TestKind>& tests, const PowerSettings& settings);

PowerPoint estimate_power(const HazardScenario& scenario, const ParameterSpec& spec, TestKind test,
                          const PowerSettings& settings);

struct PowerCurve {
  std::vector<double> kappas;
  std::vector<PowerPoint> points;  // kappas.size() x tests, kappa-major
};

/// Calibrates the template at every kappa and estimates power for each test.
PowerCurve power_curve(const HazardScenario& scenario_template, const ParameterSpec& spec,
                       const std::vector<TestKind>& tests, const std::vector<double>& kappas,
                       const PowerSettings& settings);

}  // namespace survode
