#pragma once

// Reference computations written directly from raw event records, sharing no
// code with the library beyond its data types.

#include <cstdint>
#include <random>
#include <vector>

#include "survode/events.hpp"

namespace oracle {

using survode::EventLog;
using survode::State;

// Generators ------------------------------------------------------------------

struct Options {
  std::size_t n = 100;
  /// Round times up to multiples of `tie_step` (0: continuous, no ties).
  double tie_step = 0.0;
  double horizon = 3.0;
};

/// 0 -> 1 deaths with independent uniform censoring.
EventLog survival_data(std::mt19937_64& rng, const Options& opt);
/// 0 -> 1 and 0 -> 2 competing events.
EventLog competing_data(std::mt19937_64& rng, const Options& opt);
/// 0 -> 1 illness, 0 -> 2 and 1 -> 2 deaths.
EventLog illness_death_data(std::mt19937_64& rng, const Options& opt);
/// 0 -> 0 recurrent events and 0 -> 1 death.
EventLog recurrent_data(std::mt19937_64& rng, const Options& opt);

// Timeline ----------------------------------------------------------------------

/// Distinct transition times with counts and at-risk numbers, read off the records.
struct Step {
  double time = 0.0;
  std::vector<std::vector<int>> dN;  // [from][to]
  std::vector<int> Y;                // at risk per state just before `time`
};

std::vector<Step> timeline(const EventLog& log, int states);

// Point estimates -------------------------------------------------------------------

struct Point {
  double time;
  double value;
};

/// Product-limit survival for 0 -> 1 deaths at each distinct death time.
std::vector<Point> kaplan_meier(const EventLog& log);

/// Row 0 of prod (I + dA) at each distinct transition time.
std::vector<std::pair<double, std::vector<double>>> aalen_johansen(const EventLog& log, int states);

// Variance systems, transcribed per parameter (scaled by n) --------------------------

struct VariancePoint {
  double time;
  double estimate;
  double variance;
};

std::vector<VariancePoint> survival_variance(const EventLog& log);
/// Evaluated at every death time up to t0 and at t0.
std::vector<VariancePoint> rmst_variance(const EventLog& log, double t0);
std::vector<VariancePoint> cuminc_variance(const EventLog& log);
std::vector<VariancePoint> mean_frequency_variance(const EventLog& log);
std::vector<VariancePoint> prevalence_variance(const EventLog& log);

/// Greenwood variance of the product-limit estimate at t.
double greenwood_variance(const EventLog& log, double t);

// Distributions -----------------------------------------------------------------------

/// Upper tail of chi-square(df) via the series of the regularized lower incomplete gamma.
double chi2_upper(double x, double df);

/// Asymptotic p-value of the one-sample Kolmogorov-Smirnov statistic d on n points.
double kolmogorov_p(double d, std::size_t n);

}  // namespace oracle
