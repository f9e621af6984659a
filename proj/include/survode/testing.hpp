#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <string>
#include <vector>

#include "survode/events.hpp"
#include "survode/ode.hpp"

namespace survode {

/// Point estimate of one X component in one group with its Wald 95% interval.
struct GroupEstimate {
  std::string label;
  std::size_t component = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct TestResult {
  double statistic = 0.0;
  std::size_t df = 1;
  double p_value = 1.0;
  std::vector<GroupEstimate> group1;
  std::vector<GroupEstimate> group2;
  double t0 = 0.0;
  std::string method;

  bool rejects(double level) const { return p_value < level; }
};

inline constexpr double kWaldZ = 1.96;
inline constexpr double kMinReciprocalCondition = 1e-12;

/// Upper tail of the chi-square distribution with `df` degrees of freedom.
double chi2_sf(double x, std::size_t df);

/// Wald test of X1(t0) = X2(t0) on the selected components of independent groups.
TestResult plugin_test(const PluginPath& path1, const PluginPath& path2, double t0,
                       const std::vector<std::size_t>& indices);

/// Two-sample log-rank test for the pooled transitions `event_transitions`
/// (schema indices, identical schemas required).
TestResult logrank_test(const CountingSystem& cs1, const CountingSystem& cs2,
                        const std::vector<std::size_t>& event_transitions);

inline TestResult logrank_test(const CountingSystem& cs1, const CountingSystem& cs2,
                               std::size_t event_component) {
  return logrank_test(cs1, cs2, std::vector<std::size_t>{event_component});
}

/// Kaplan-Meier difference at t0 standardised by Greenwood variances.
TestResult greenwood_survival_test(const CountingSystem& cs1, const CountingSystem& cs2, double t0,
                                   const std::vector<std::size_t>& event_transitions = {0});

}  // namespace survode
