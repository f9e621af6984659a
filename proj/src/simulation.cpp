#include "survode/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <set>
#include <thread>

#include "survode/error.hpp"

namespace survode {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(seed ^ mix(stream));
}

double Rng::uniform() {
  // 53 random bits, shifted half a step off zero.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw SimulationError("empty range");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do x = engine_();
  while (x >= limit);
  return x % bound;
}

// Names ---------------------------------------------------------------------------

std::string to_string(HazardShape shape) {
  switch (shape) {
    case HazardShape::kConstant: return "constant";
    case HazardShape::kCrossing: return "crossing";
    case HazardShape::kDeviating: return "deviating";
  }
  return "?";
}

HazardShape parse_shape(const std::string& name) {
  if (name == "constant") return HazardShape::kConstant;
  if (name == "crossing") return HazardShape::kCrossing;
  if (name == "deviating") return HazardShape::kDeviating;
  throw SimulationError("unknown hazard shape '" + name + "' (constant, crossing, deviating)");
}

std::string to_string(StateModel model) {
  switch (model) {
    case StateModel::kSurvival: return "survival";
    case StateModel::kCompetingRisks: return "competing";
    case StateModel::kIllnessDeath: return "illness_death";
    case StateModel::kRecurrent: return "recurrent";
  }
  return "?";
}

StateModel parse_model(const std::string& name) {
  if (name == "survival") return StateModel::kSurvival;
  if (name == "competing") return StateModel::kCompetingRisks;
  if (name == "illness_death") return StateModel::kIllnessDeath;
  if (name == "recurrent") return StateModel::kRecurrent;
  throw SimulationError("unknown model '" + name + "' (survival, competing, illness_death, recurrent)");
}

std::string to_string(TestKind kind) {
  switch (kind) {
    case TestKind::kPlugin: return "plugin";
    case TestKind::kLogRank: return "logrank";
    case TestKind::kGreenwood: return "greenwood";
  }
  return "?";
}

TestKind parse_test(const std::string& name) {
  if (name == "plugin") return TestKind::kPlugin;
  if (name == "logrank" || name == "log-rank") return TestKind::kLogRank;
  if (name == "greenwood") return TestKind::kGreenwood;
  throw SimulationError("unknown test '" + name + "' (plugin, logrank, greenwood)");
}

// Hazards -------------------------------------------------------------------------

namespace {

// Smallest u >= 0 with h u + b u^2 / 2 = target for a line starting at rate h.
std::optional<double> line_root(double h, double b, double target) {
  if (target <= 0.0) return 0.0;
  const double disc = h * h + 2.0 * b * target;
  if (disc < 0.0) return std::nullopt;
  const double denom = h + std::sqrt(disc);
  if (!(denom > 0.0)) return std::nullopt;
  return 2.0 * target / denom;
}

}  // namespace

double LinearHazard::rate(double t) const {
  switch (shape) {
    case HazardShape::kConstant: return level;
    case HazardShape::kCrossing: return level + slope * (t - changepoint);
    case HazardShape::kDeviating: return level + slope * std::max(0.0, t - changepoint);
  }
  return 0.0;
}

double LinearHazard::cumulative(double t) const {
  if (t <= 0.0) return 0.0;
  switch (shape) {
    case HazardShape::kConstant: return level * t;
    case HazardShape::kCrossing: return (level - slope * changepoint) * t + 0.5 * slope * t * t;
    case HazardShape::kDeviating: {
      const double after = std::max(0.0, t - changepoint);
      return level * t + 0.5 * slope * after * after;
    }
  }
  return 0.0;
}

std::optional<double> LinearHazard::inverse_cumulative(double target, double horizon) const {
  std::optional<double> t;
  switch (shape) {
    case HazardShape::kConstant:
      t = line_root(level, 0.0, target);
      break;
    case HazardShape::kCrossing:
      t = line_root(level - slope * changepoint, slope, target);
      break;
    case HazardShape::kDeviating: {
      const double before = level * changepoint;
      if (target <= before) {
        t = line_root(level, 0.0, target);
      } else if (auto u = line_root(level, slope, target - before)) {
        t = changepoint + *u;
      }
      break;
    }
  }
  if (t && *t > horizon) return std::nullopt;
  return t;
}

bool LinearHazard::nonnegative_on(double horizon) const {
  constexpr double tol = -1e-12;
  if (!std::isfinite(level) || !std::isfinite(slope) || !std::isfinite(changepoint)) return false;
  if (rate(0.0) < tol || rate(horizon) < tol) return false;
  return changepoint <= 0.0 || changepoint >= horizon || rate(changepoint) >= tol;
}

const GroupHazards& HazardScenario::group(int g) const {
  if (g == 1) return group1;
  if (g == 2) return group2;
  throw SimulationError("group must be 1 or 2, got " + std::to_string(g));
}

std::vector<Transition> HazardScenario::transitions() const {
  switch (model) {
    case StateModel::kSurvival: return {{0, 1}};
    case StateModel::kCompetingRisks: return {{0, 1}, {0, 2}};
    case StateModel::kIllnessDeath: return {{0, 1}, {0, 2}, {1, 2}};
    case StateModel::kRecurrent: return {{0, 0}, {0, 1}};
  }
  return {};
}

double HazardScenario::cumulative(int g, const Transition& tr, double time) const {
  const auto& h = group(g);
  const auto all = transitions();
  if (std::find(all.begin(), all.end(), tr) == all.end())
    throw SimulationError("transition " + to_string(tr) + " is not part of the " + to_string(model) + " model");
  if (tr == all.front()) return h.primary.cumulative(time);
  if (tr == all[1]) return h.secondary * std::max(time, 0.0);
  return h.tertiary * std::max(time, 0.0);
}

std::vector<std::size_t> HazardScenario::primary_transitions() const { return {0}; }

void HazardScenario::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw SimulationError("horizon must be positive");
  if (group1.primary.shape != group2.primary.shape) throw SimulationError("groups must share the hazard shape");
  for (int g : {1, 2}) {
    const auto& h = group(g);
    const std::string who = "group " + std::to_string(g);
    if (!h.primary.nonnegative_on(horizon)) throw SimulationError(who + ": primary hazard negative before the horizon");
    if (!(h.secondary >= 0.0) || !(h.tertiary >= 0.0)) throw SimulationError(who + ": negative constant hazard");
  }
  if (shape() == HazardShape::kConstant && free == FreeCoefficient::kSlope)
    throw SimulationError("a constant hazard has no slope to calibrate");
}

HazardScenario default_scenario(const std::string& parameter, HazardShape shape) {
  HazardScenario s;
  GroupHazards g;
  double level = 0.3;
  if (parameter == "survival" || parameter == "rmst") {
    s.model = StateModel::kSurvival;
  } else if (parameter == "cuminc") {
    s.model = StateModel::kCompetingRisks;
    g.secondary = 0.4;
  } else if (parameter == "prevalence") {
    s.model = StateModel::kIllnessDeath;
    g.secondary = 0.1;
    g.tertiary = 0.5;
  } else if (parameter == "mean_frequency") {
    s.model = StateModel::kRecurrent;
    level = 1.0;
    g.secondary = 0.2;
  } else {
    throw SimulationError("no default scenario for parameter '" + parameter + "'");
  }
  g.primary.shape = shape;
  g.primary.level = level;
  switch (shape) {
    case HazardShape::kConstant:
      s.free = FreeCoefficient::kLevel;
      break;
    case HazardShape::kCrossing:
      // Group 1 is flat; group 2 is a line through (changepoint, level).
      // Survival crosses late, RMST and the incidence early.
      if (parameter == "survival") g.primary.changepoint = 1.1;
      else if (parameter == "rmst") g.primary.changepoint = 0.65;
      else if (parameter == "cuminc") g.primary.changepoint = 0.3;
      else g.primary.changepoint = 0.6;
      s.free = FreeCoefficient::kSlope;
      break;
    case HazardShape::kDeviating:
      g.primary.changepoint = 0.75;
      s.free = FreeCoefficient::kSlope;
      break;
  }
  s.group1 = g;
  s.group2 = g;
  s.validate();
  return s;
}

HazardScenario slope_ratio_scenario(HazardScenario base, double ratio) {
  base.group2.primary.slope = ratio * base.group1.primary.slope;
  base.free = FreeCoefficient::kLevel;
  return base;
}

// Sampling ------------------------------------------------------------------------

EventLog sample_event_times(const HazardScenario& scenario, int group, std::size_t n, std::uint64_t seed) {
  scenario.validate();
  const auto& h = scenario.group(group);
  const double end = scenario.horizon;
  Rng rng(seed);
  const auto constant_time = [&](double rate) {
    const double e = rng.exponential();
    return rate > 0.0 ? e / rate : std::numeric_limits<double>::infinity();
  };

  EventLog out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    EventRecord rec;
    rec.subject_id = std::to_string(group) + "-" + std::to_string(i + 1);
    rec.group = std::to_string(group);
    const auto primary = h.primary.inverse_cumulative(rng.exponential(), end);
    const double first = primary.value_or(std::numeric_limits<double>::infinity());
    switch (scenario.model) {
      case StateModel::kSurvival:
        if (primary) rec.transitions.push_back({first, 0, 1});
        break;
      case StateModel::kCompetingRisks: {
        const double other = constant_time(h.secondary);
        if (first <= end && first < other) rec.transitions.push_back({first, 0, 1});
        else if (other <= end && other < first) rec.transitions.push_back({other, 0, 2});
        break;
      }
      case StateModel::kIllnessDeath: {
        const double death = constant_time(h.secondary);
        if (first <= end && first < death) {
          rec.transitions.push_back({first, 0, 1});
          const double after = first + constant_time(h.tertiary);
          if (after <= end) rec.transitions.push_back({after, 1, 2});
        } else if (death <= end) {
          rec.transitions.push_back({death, 0, 2});
        }
        break;
      }
      case StateModel::kRecurrent: {
        const double death = constant_time(h.secondary);
        const double stop = std::min(death, end);
        // Successive events: unit-exponential gaps on the cumulative hazard scale.
        double running = primary ? h.primary.cumulative(*primary) : 0.0;
        for (auto next = primary; next && *next < stop;
             next = h.primary.inverse_cumulative(running += rng.exponential(), end)) {
          if (!rec.transitions.empty() && *next <= rec.transitions.back().time) continue;
          rec.transitions.push_back({*next, 0, 0});
        }
        if (death <= end) rec.transitions.push_back({death, 0, 1});
        break;
      }
    }
    if (rec.transitions.empty() || rec.final_state() == 0 ||
        (scenario.model == StateModel::kIllnessDeath && rec.final_state() == 1))
      rec.censor_time = end;
    out.push_back(std::move(rec));
  }
  return out;
}

namespace {

std::vector<std::size_t> chosen_subjects(std::size_t n, double fraction, Rng& rng) {
  if (!(fraction >= 0.0 && fraction < 1.0)) throw SimulationError("censoring fraction must lie in [0, 1)");
  const auto count = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = 0; i < count; ++i) std::swap(order[i], order[i + static_cast<std::size_t>(rng.below(n - i))]);
  order.resize(count);
  return order;
}

void censor_at(EventRecord& rec, double c) {
  std::erase_if(rec.transitions, [c](const TransitionEvent& e) { return e.time > c; });
  rec.censor_time = c;
}

}  // namespace

EventLog apply_censoring(EventLog records, double fraction, std::uint64_t seed) {
  Rng rng(seed);
  for (auto i : chosen_subjects(records.size(), fraction, rng)) censor_at(records[i], rng.uniform() * records[i].end_of_followup());
  return records;
}

EventLog apply_independent_censoring(EventLog records, double fraction, double horizon, std::uint64_t seed) {
  if (!(horizon > 0.0)) throw SimulationError("censoring horizon must be positive");
  Rng rng(seed);
  for (auto i : chosen_subjects(records.size(), fraction, rng)) {
    const double c = rng.uniform() * horizon;
    if (c < records[i].end_of_followup()) censor_at(records[i], c);
  }
  return records;
}

std::string to_string(CensoringScheme scheme) {
  return scheme == CensoringScheme::kIndependent ? "independent" : "before_event";
}

CensoringScheme parse_censoring_scheme(const std::string& name) {
  if (name == "independent") return CensoringScheme::kIndependent;
  if (name == "before_event") return CensoringScheme::kBeforeEvent;
  throw SimulationError("unknown censoring scheme '" + name + "' (independent, before_event)");
}

std::pair<EventLog, EventLog> simulate_groups(const HazardScenario& scenario, std::size_t n_per_group,
                                              double censoring, CensoringScheme scheme, std::uint64_t seed) {
  const auto censor = [&](EventLog log, std::uint64_t stream) {
    if (scheme == CensoringScheme::kIndependent)
      return apply_independent_censoring(std::move(log), censoring, scenario.horizon, derive_seed(seed, stream));
    return apply_censoring(std::move(log), censoring, derive_seed(seed, stream));
  };
  return {censor(sample_event_times(scenario, 1, n_per_group, derive_seed(seed, 1)), 3),
          censor(sample_event_times(scenario, 2, n_per_group, derive_seed(seed, 2)), 4)};
}

// Calibration -------------------------------------------------------------------

Eigen::VectorXd true_parameter(const HazardScenario& scenario, int group, const ParameterSpec& spec, double t0,
                               std::size_t steps) {
  if (steps == 0) throw SimulationError("need at least one mesh step");
  if (!(t0 > 0.0)) throw SimulationError("t0 must be positive");
  const auto& def = spec.definition;
  def.check();
  if (spec.hazard_schema.size() != def.q) throw SimulationError("hazard schema does not match the parameter");
  for (const auto& c : spec.hazard_schema)
    for (const auto& term : c.terms) {
      std::set<State> origins;
      for (const auto& tr : term.transitions) origins.insert(tr.from);
      if (origins.size() > 1)
        throw SimulationError("component '" + c.label + "' pools several origin states; its true hazard is not available");
    }

  const auto q = static_cast<Eigen::Index>(def.q);
  const auto cumulative = [&](double t) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(q);
    for (Eigen::Index j = 0; j < q; ++j) {
      const auto& c = spec.hazard_schema[static_cast<std::size_t>(j)];
      if (c.lebesgue) {
        a(j) = t;
        continue;
      }
      for (const auto& term : c.terms)
        for (const auto& tr : term.transitions) a(j) += scenario.cumulative(group, tr, t);
    }
    return a;
  };

  Eigen::VectorXd x = def.x0;
  Eigen::VectorXd previous = cumulative(0.0);
  for (std::size_t k = 1; k <= steps; ++k) {
    const Eigen::VectorXd current = cumulative(t0 * static_cast<double>(k) / static_cast<double>(steps));
    x += def.F(x) * (current - previous);
    previous = current;
  }
  return x;
}

std::pair<double, double> free_coefficient_bracket(const HazardScenario& s) {
  const auto& h = s.group2.primary;
  const double end = s.horizon;
  const double c = h.changepoint;
  constexpr double span = 20.0;
  if (s.free == FreeCoefficient::kLevel) {
    double lo = 0.0;
    if (h.shape == HazardShape::kCrossing) lo = std::max({0.0, h.slope * c, -h.slope * (end - c)});
    if (h.shape == HazardShape::kDeviating) lo = std::max(0.0, -h.slope * (end - c));
    return {lo, lo + span};
  }
  switch (h.shape) {
    case HazardShape::kConstant:
      throw SimulationError("a constant hazard has no slope to calibrate");
    case HazardShape::kCrossing: {
      const double lo = c < end ? -h.level / (end - c) : -span;
      const double hi = c > 0.0 ? h.level / c : span;
      return {lo, hi};
    }
    case HazardShape::kDeviating:
      if (c >= end) throw SimulationError("changepoint at or after the horizon leaves no slope to calibrate");
      return {-h.level / (end - c), span / (end - c)};
  }
  return {0.0, 0.0};
}

HazardScenario calibrate_kappa(const HazardScenario& scenario_template, const ParameterSpec& spec, double t0,
                               double kappa) {
  if (spec.estimand_indices.empty()) throw SimulationError("parameter has no estimand");
  const auto idx = static_cast<Eigen::Index>(spec.estimand_indices.front());
  HazardScenario s = scenario_template;
  double& coefficient = s.free == FreeCoefficient::kLevel ? s.group2.primary.level : s.group2.primary.slope;
  // The template's own value of the free coefficient does not matter.
  coefficient = free_coefficient_bracket(s).first;
  s.validate();
  const double target = true_parameter(s, 1, spec, t0)(idx) - kappa;

  const auto gap = [&](double v) {
    coefficient = v;
    return true_parameter(s, 2, spec, t0)(idx) - target;
  };
  auto [lo, hi] = free_coefficient_bracket(s);
  double g_lo = gap(lo);
  const double g_hi = gap(hi);
  if (std::abs(g_lo) <= kCalibrationTolerance) {
    coefficient = lo;
    return s;
  }
  if (std::abs(g_hi) <= kCalibrationTolerance) {
    coefficient = hi;
    return s;
  }
  if ((g_lo > 0.0) == (g_hi > 0.0))
    throw SimulationError("kappa = " + std::to_string(kappa) + " is not reachable; achievable range is [" +
                          std::to_string(std::min(-g_lo, -g_hi) + kappa) + ", " +
                          std::to_string(std::max(-g_lo, -g_hi) + kappa) + "]");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g = gap(mid);
    if (std::abs(g) <= kCalibrationTolerance || hi - lo < 1e-15) {
      coefficient = mid;
      s.validate();
      return s;
    }
    if ((g > 0.0) == (g_lo > 0.0)) {
      lo = mid;
      g_lo = g;
    } else {
      hi = mid;
    }
  }
  throw SimulationError("calibration did not converge for kappa = " + std::to_string(kappa));
}

// Power -------------------------------------------------------------------------

namespace {

std::vector<ReplicationOutcome> replicate(const HazardScenario& scenario, const ParameterSpec& spec,
                                          const std::vector<TestKind>& tests, const PowerSettings& settings,
                                          std::uint64_t seed) {
  std::vector<ReplicationOutcome> out(tests.size());
  const auto schema = scenario.transitions();
  std::optional<CountingSystem> cs1, cs2;
  try {
    const auto [g1, g2] =
        simulate_groups(scenario, settings.n_per_group, settings.censoring, settings.censoring_scheme, seed);
    cs1 = build_counting_system(g1, schema);
    cs2 = build_counting_system(g2, schema);
  } catch (const Error&) {
    return out;
  }
  for (std::size_t i = 0; i < tests.size(); ++i) {
    try {
      TestResult r;
      switch (tests[i]) {
        case TestKind::kPlugin: {
          const auto p1 = solve_plugin(spec.definition, estimate_hazards(*cs1, spec, settings.covariation), settings.t0);
          const auto p2 = solve_plugin(spec.definition, estimate_hazards(*cs2, spec, settings.covariation), settings.t0);
          r = plugin_test(p1, p2, settings.t0, spec.estimand_indices);
          break;
        }
        case TestKind::kLogRank:
          r = logrank_test(*cs1, *cs2, scenario.primary_transitions());
          break;
        case TestKind::kGreenwood:
          r = greenwood_survival_test(*cs1, *cs2, settings.t0, scenario.primary_transitions());
          break;
      }
      if (std::isfinite(r.statistic) && std::isfinite(r.p_value)) out[i] = {r.statistic, r.p_value};
    } catch (const Error&) {
    }
  }
  return out;
}

}  // namespace

PowerStudy run_power_study(const HazardScenario& scenario, const ParameterSpec& spec,
                           const std::vector<TestKind>& tests, const PowerSettings& settings) {
  scenario.validate();
  if (tests.empty()) throw SimulationError("no tests selected");
  if (settings.replications == 0) throw SimulationError("need at least one replication");
  if (settings.n_per_group == 0) throw SimulationError("need at least one subject per group");
  if (!(settings.level > 0.0 && settings.level < 1.0)) throw SimulationError("level must lie in (0, 1)");
  if (!(settings.t0 > 0.0) || settings.t0 > scenario.horizon)
    throw SimulationError("t0 must lie in (0, horizon]");

  PowerStudy study;
  study.tests = tests;
  study.outcomes.resize(settings.replications);
  unsigned threads = settings.threads ? settings.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, settings.replications));
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t r; (r = next.fetch_add(1)) < settings.replications;)
      study.outcomes[r] = replicate(scenario, spec, tests, settings, derive_seed(settings.seed, r));
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (std::size_t i = 0; i < tests.size(); ++i) {
    PowerPoint point;
    point.test = tests[i];
    point.n_per_group = settings.n_per_group;
    point.level = settings.level;
    point.replications = settings.replications;
    std::size_t rejections = 0;
    for (const auto& rep : study.outcomes) {
      if (!rep[i].p_value) ++point.failures;
      else if (*rep[i].p_value < settings.level) ++rejections;
    }
    const std::size_t used = settings.replications - point.failures;
    if (used > 0) {
      point.rate = static_cast<double>(rejections) / static_cast<double>(used);
      point.std_error = std::sqrt(point.rate * (1.0 - point.rate) / static_cast<double>(used));
    }
    point.flagged = used == 0 || static_cast<double>(point.failures) > 0.01 * static_cast<double>(settings.replications);
    study.points.push_back(point);
  }
  return study;
}

PowerPoint estimate_power(const HazardScenario& scenario, const ParameterSpec& spec, TestKind test,
                          const PowerSettings& settings) {
  return run_power_study(scenario, spec, {test}, settings).points.front();
}

PowerCurve power_curve(const HazardScenario& scenario_template, const ParameterSpec& spec,
                       const std::vector<TestKind>& tests, const std::vector<double>& kappas,
                       const PowerSettings& settings) {
  PowerCurve curve;
  curve.kappas = kappas;
  for (double kappa : kappas) {
    const auto scenario = calibrate_kappa(scenario_template, spec, settings.t0, kappa);
    auto study = run_power_study(scenario, spec, tests, settings);
    for (auto& p : study.points) {
      p.kappa = kappa;
      curve.points.push_back(p);
    }
  }
  return curve;
}

}  // namespace survode
