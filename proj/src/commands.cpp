#include "survode/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "survode/error.hpp"

namespace survode {

using json = nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw UsageError(where + " must be an object");
  for (const auto& [key, value] : j.items())
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw UsageError(where + ": unknown key '" + key + "'");
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError(where + "." + key + " is missing or has the wrong type");
  }
}

template <class T>
void maybe(const json& j, const char* key, const std::string& where, T& out) {
  if (j.contains(key)) out = get<T>(j, key, where);
}

Transition parse_transition(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    throw UsageError(where + ": a transition is written [from, to]");
  return {j[0].get<int>(), j[1].get<int>()};
}

std::vector<Transition> parse_transitions(const json& j, const std::string& where) {
  if (!j.is_array()) throw UsageError(where + " must be a list of [from, to] pairs");
  std::vector<Transition> out;
  for (const auto& t : j) out.push_back(parse_transition(t, where));
  return out;
}

HazardComponent parse_component(const json& j, const std::string& where) {
  check_keys(j, {"label", "terms", "transitions", "time"}, where);
  HazardComponent c;
  c.label = j.value("label", std::string("A"));
  if (j.value("time", false)) {
    if (j.contains("terms") || j.contains("transitions")) throw UsageError(where + ": a time component has no transitions");
    c.lebesgue = true;
    return c;
  }
  if (j.contains("terms") == j.contains("transitions"))
    throw UsageError(where + ": give exactly one of 'terms' or 'transitions'");
  if (j.contains("transitions")) {
    c.terms.push_back({parse_transitions(j["transitions"], where + ".transitions")});
  } else {
    if (!j["terms"].is_array() || j["terms"].empty()) throw UsageError(where + ".terms must be a nonempty list");
    for (const auto& t : j["terms"]) c.terms.push_back({parse_transitions(t, where + ".terms")});
  }
  for (const auto& t : c.terms)
    if (t.transitions.empty()) throw UsageError(where + ": empty term");
  return c;
}

Covariation parse_covariation(const std::string& s, const std::string& where) {
  if (s == "jump_products") return Covariation::kJumpProducts;
  if (s == "optional") return Covariation::kOptional;
  throw UsageError(where + ": covariation must be 'jump_products' or 'optional'");
}

Analysis parse_analysis(const json& j, const std::string& where, Covariation fallback) {
  check_keys(j, {"name", "parameter", "cause", "competing", "components", "estimand", "covariation"}, where);
  Analysis a;
  const auto name = get<std::string>(j, "parameter", where);
  try {
    if (name == "cuminc" && (j.contains("cause") || j.contains("competing")))
      a.spec = cuminc_spec(j.value("cause", 1), j.value("competing", std::vector<int>{2}));
    else
      a.spec = parameter_spec(name);
  } catch (const Error& e) {
    throw UsageError(where + ": " + e.what());
  }
  a.name = j.value("name", name);
  a.covariation = j.contains("covariation") ? parse_covariation(get<std::string>(j, "covariation", where), where)
                                            : fallback;
  if (j.contains("components")) {
    const auto& comps = j["components"];
    if (!comps.is_array() || comps.size() != a.spec.hazard_schema.size())
      throw UsageError(where + ".components: '" + name + "' needs " +
                       std::to_string(a.spec.hazard_schema.size()) + " components");
    for (std::size_t i = 0; i < comps.size(); ++i) {
      auto c = parse_component(comps[i], where + ".components[" + std::to_string(i) + "]");
      if (c.lebesgue != a.spec.hazard_schema[i].lebesgue)
        throw UsageError(where + ".components[" + std::to_string(i) + "]: component must " +
                         (a.spec.hazard_schema[i].lebesgue ? "" : "not ") + "be time");
      a.spec.hazard_schema[i] = std::move(c);
    }
  }
  a.indices = a.spec.estimand_indices;
  maybe(j, "estimand", where, a.indices);
  if (a.indices.empty()) throw UsageError(where + ".estimand must not be empty");
  for (auto i : a.indices)
    if (i >= a.spec.definition.p) throw UsageError(where + ".estimand index " + std::to_string(i) + " out of range");
  return a;
}

void apply_group(const json& j, const std::string& where, GroupHazards& g) {
  check_keys(j, {"level", "slope", "changepoint", "secondary", "tertiary"}, where);
  maybe(j, "level", where, g.primary.level);
  maybe(j, "slope", where, g.primary.slope);
  maybe(j, "changepoint", where, g.primary.changepoint);
  maybe(j, "secondary", where, g.secondary);
  maybe(j, "tertiary", where, g.tertiary);
}

template <class F>
auto usage_guard(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const UsageError&) {
    throw;
  } catch (const Error& e) {
    throw UsageError(where + ": " + e.what());
  }
}

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string p_text(double p) {
  const std::string s = fixed2(p);
  return s == "0.00" ? "0" : s;
}

void emit(const Table& t, const std::string& path) {
  if (path.empty() || path == "-") t.write(std::cout);
  else t.write(path);
}

std::vector<double> sorted_times(const RunConfig& cfg) {
  if (cfg.times.empty()) throw UsageError("no evaluation time given (set 't0' or 'times')");
  auto times = cfg.times;
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  return times;
}

}  // namespace

nlohmann::json load_config_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("config '" + path + "': " + e.what());
  }
}

RunConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  check_keys(j,
             {"data", "transitions", "groups", "analyses", "parameter", "name", "cause", "competing", "components",
              "estimand", "covariation", "t0", "times", "level", "z0", "rank_policy", "scenario", "simulate", "power",
              "seed", "output", "summary"},
             "config");
  RunConfig cfg;
  maybe(j, "seed", "config", cfg.seed);
  maybe(j, "output", "config", cfg.output);
  maybe(j, "summary", "config", cfg.summary);
  maybe(j, "level", "config", cfg.level);
  if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw UsageError("config.level must lie in (0, 1)");

  if (j.contains("data")) {
    const auto& d = j["data"];
    check_keys(d,
               {"path", "id_column", "group_column", "time_column", "status_column", "covariates", "states",
                "recurrent_codes", "censor_code", "time_divisor"},
               "data");
    maybe(d, "path", "data", cfg.data_path);
    if (!cfg.data_path.empty() && std::filesystem::path(cfg.data_path).is_relative() && !base_dir.empty())
      cfg.data_path = (base_dir / cfg.data_path).string();
    maybe(d, "id_column", "data", cfg.csv.id_column);
    maybe(d, "group_column", "data", cfg.csv.group_column);
    maybe(d, "time_column", "data", cfg.csv.time_column);
    maybe(d, "status_column", "data", cfg.csv.status_column);
    maybe(d, "covariates", "data", cfg.csv.covariate_columns);
    maybe(d, "recurrent_codes", "data", cfg.csv.recurrent_codes);
    maybe(d, "censor_code", "data", cfg.csv.censor_code);
    maybe(d, "time_divisor", "data", cfg.csv.time_divisor);
    if (!(cfg.csv.time_divisor > 0.0)) throw UsageError("data.time_divisor must be positive");
    if (d.contains("states")) {
      if (!d["states"].is_object()) throw UsageError("data.states maps status codes to states");
      for (const auto& [code, state] : d["states"].items()) {
        int c = 0;
        try {
          c = std::stoi(code);
        } catch (const std::exception&) {
          throw UsageError("data.states: key '" + code + "' is not an integer code");
        }
        if (!state.is_number_integer()) throw UsageError("data.states: state for code " + code + " must be an integer");
        cfg.csv.states[c] = state.get<int>();
      }
    }
  }
  if (j.contains("transitions")) cfg.transitions = parse_transitions(j["transitions"], "transitions");
  maybe(j, "groups", "config", cfg.groups);

  const Covariation covariation =
      j.contains("covariation") ? parse_covariation(get<std::string>(j, "covariation", "config"), "config")
                                : Covariation::kJumpProducts;
  if (j.contains("analyses")) {
    if (j.contains("parameter")) throw UsageError("give either 'analyses' or a top-level 'parameter', not both");
    if (!j["analyses"].is_array() || j["analyses"].empty()) throw UsageError("analyses must be a nonempty list");
    for (std::size_t i = 0; i < j["analyses"].size(); ++i)
      cfg.analyses.push_back(
          parse_analysis(j["analyses"][i], "analyses[" + std::to_string(i) + "]", covariation));
  } else if (j.contains("parameter")) {
    json a = json::object();
    for (const char* k : {"name", "parameter", "cause", "competing", "components", "estimand"})
      if (j.contains(k)) a[k] = j[k];
    cfg.analyses.push_back(parse_analysis(a, "config", covariation));
  }

  if (j.contains("t0") && j.contains("times")) throw UsageError("give either 't0' or 'times'");
  if (j.contains("t0")) cfg.times = {get<double>(j, "t0", "config")};
  maybe(j, "times", "config", cfg.times);
  for (double t : cfg.times)
    if (!(t > 0.0) || !std::isfinite(t)) throw UsageError("evaluation times must be positive");

  if (j.contains("z0")) {
    const auto z = get<std::vector<double>>(j, "z0", "config");
    if (z.size() != cfg.csv.covariate_columns.size())
      throw UsageError("z0 has " + std::to_string(z.size()) + " entries for " +
                       std::to_string(cfg.csv.covariate_columns.size()) + " covariate columns");
    cfg.z0 = Eigen::Map<const Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(z.size()));
  }
  if (j.contains("rank_policy")) {
    const auto r = get<std::string>(j, "rank_policy", "config");
    if (r == "skip") cfg.rank_policy = RankPolicy::kSkip;
    else if (r == "error") cfg.rank_policy = RankPolicy::kThrow;
    else throw UsageError("rank_policy must be 'skip' or 'error'");
  }

  // Scenario.
  const json scen = j.value("scenario", json::object());
  check_keys(scen, {"parameter", "shape", "model", "horizon", "free", "group1", "group2"}, "scenario");
  if (scen.contains("parameter")) cfg.scenario_parameter = get<std::string>(scen, "parameter", "scenario");
  else if (cfg.analyses.size() == 1) cfg.scenario_parameter = cfg.analyses.front().spec.name;
  const HazardShape shape = usage_guard("scenario", [&] { return parse_shape(scen.value("shape", std::string("constant"))); });
  cfg.scenario = usage_guard("scenario", [&] { return default_scenario(cfg.scenario_parameter, shape); });
  if (scen.contains("model"))
    cfg.scenario.model = usage_guard("scenario", [&] { return parse_model(get<std::string>(scen, "model", "scenario")); });
  maybe(scen, "horizon", "scenario", cfg.scenario.horizon);
  if (scen.contains("free")) {
    const auto f = get<std::string>(scen, "free", "scenario");
    if (f == "level") cfg.scenario.free = FreeCoefficient::kLevel;
    else if (f == "slope") cfg.scenario.free = FreeCoefficient::kSlope;
    else throw UsageError("scenario.free must be 'level' or 'slope'");
  }
  if (scen.contains("group1")) apply_group(scen["group1"], "scenario.group1", cfg.scenario.group1);
  cfg.scenario.group2 = cfg.scenario.group1;
  if (scen.contains("group2")) apply_group(scen["group2"], "scenario.group2", cfg.scenario.group2);
  usage_guard("scenario", [&] { cfg.scenario.validate(); return 0; });

  const json sim = j.value("simulate", json::object());
  check_keys(sim, {"n_per_group", "censoring", "kappa"}, "simulate");
  maybe(sim, "n_per_group", "simulate", cfg.simulate_n);
  maybe(sim, "censoring", "simulate", cfg.simulate_censoring);
  if (sim.contains("kappa")) cfg.kappa = get<double>(sim, "kappa", "simulate");
  if (cfg.simulate_n == 0) throw UsageError("simulate.n_per_group must be positive");
  if (!(cfg.simulate_censoring >= 0.0 && cfg.simulate_censoring < 1.0))
    throw UsageError("simulate.censoring must lie in [0, 1)");

  const json pw = j.value("power", json::object());
  check_keys(pw,
             {"kappas", "n_per_group", "replications", "level", "censoring", "censoring_scheme", "tests", "t0", "threads",
              "covariation"},
             "power");
  if (pw.contains("censoring_scheme"))
    cfg.power.censoring_scheme = usage_guard(
        "power", [&] { return parse_censoring_scheme(get<std::string>(pw, "censoring_scheme", "power")); });
  cfg.power.seed = cfg.seed;
  cfg.power.level = cfg.level;
  cfg.power.t0 = cfg.scenario.horizon;
  cfg.power.covariation = covariation;
  maybe(pw, "n_per_group", "power", cfg.power.n_per_group);
  maybe(pw, "replications", "power", cfg.power.replications);
  maybe(pw, "level", "power", cfg.power.level);
  maybe(pw, "censoring", "power", cfg.power.censoring);
  maybe(pw, "t0", "power", cfg.power.t0);
  maybe(pw, "threads", "power", cfg.power.threads);
  if (pw.contains("covariation"))
    cfg.power.covariation = parse_covariation(get<std::string>(pw, "covariation", "power"), "power");
  cfg.kappas = {0.0};
  maybe(pw, "kappas", "power", cfg.kappas);
  if (cfg.kappas.empty()) throw UsageError("power.kappas must not be empty");
  if (pw.contains("tests")) {
    cfg.tests.clear();
    for (const auto& name : get<std::vector<std::string>>(pw, "tests", "power"))
      cfg.tests.push_back(usage_guard("power.tests", [&] { return parse_test(name); }));
    if (cfg.tests.empty()) throw UsageError("power.tests must not be empty");
  }
  if (cfg.power.replications == 0) throw UsageError("power.replications must be at least 1");
  if (cfg.power.n_per_group == 0) throw UsageError("power.n_per_group must be positive");
  if (!(cfg.power.level > 0.0 && cfg.power.level < 1.0)) throw UsageError("power.level must lie in (0, 1)");
  if (!(cfg.power.censoring >= 0.0 && cfg.power.censoring < 1.0)) throw UsageError("power.censoring must lie in [0, 1)");
  if (!(cfg.power.t0 > 0.0) || cfg.power.t0 > cfg.scenario.horizon)
    throw UsageError("power.t0 must lie in (0, horizon]");
  return cfg;
}

std::vector<Transition> resolve_transitions(const RunConfig& cfg, const EventLog& log) {
  std::vector<Transition> out = cfg.transitions;
  const auto add = [&](const Transition& t) {
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
  };
  if (out.empty()) {
    for (const auto& rec : log)
      for (const auto& e : rec.transitions) add(e.type());
    std::sort(out.begin(), out.end(), [](const Transition& a, const Transition& b) {
      return std::tie(a.from, a.to) < std::tie(b.from, b.to);
    });
  }
  for (const auto& a : cfg.analyses)
    for (const auto& t : a.spec.transitions()) add(t);
  return out;
}

std::vector<std::string> resolve_groups(const RunConfig& cfg, const EventLog& log) {
  const auto present = group_labels(log);
  if (cfg.groups.empty()) return present;
  for (const auto& g : cfg.groups)
    if (std::find(present.begin(), present.end(), g) == present.end())
      throw UsageError("group '" + g + "' does not occur in the data");
  return cfg.groups;
}

HazardPath analysis_hazards(const RunConfig& cfg, const Analysis& analysis, const CountingSystem& cs) {
  if (!cfg.z0) return estimate_hazards(cs, analysis.spec, analysis.covariation);
  return additive_hazard(cs, cs.covariate_matrix(), *cfg.z0, analysis.spec.hazard_schema, cfg.rank_policy);
}

std::vector<TestRow> run_tests(const RunConfig& cfg, const EventLog& log) {
  if (cfg.analyses.empty()) throw UsageError("no parameter to test (set 'parameter' or 'analyses')");
  const auto times = sorted_times(cfg);
  const auto groups = resolve_groups(cfg, log);
  if (groups.size() != 2)
    throw UsageError("the test compares two groups; the data has " + std::to_string(groups.size()) +
                     " (select two with 'groups')");
  const auto schema = resolve_transitions(cfg, log);
  const auto g1 = filter_group(log, groups[0]);
  const auto g2 = filter_group(log, groups[1]);
  const auto cs1 = build_counting_system(g1, schema);
  const auto cs2 = build_counting_system(g2, schema);

  std::vector<std::vector<TestRow>> by_analysis;
  for (const auto& a : cfg.analyses) {
    const auto h1 = analysis_hazards(cfg, a, cs1);
    const auto h2 = analysis_hazards(cfg, a, cs2);
    std::vector<TestRow> rows;
    // Solved per time: between jumps a time component keeps growing.
    for (double t : times)
      rows.push_back({a.name, a.spec.name,
                      plugin_test(solve_plugin(a.spec.definition, h1, t), solve_plugin(a.spec.definition, h2, t), t,
                                  a.indices)});
    by_analysis.push_back(std::move(rows));
  }
  std::vector<TestRow> out;
  for (std::size_t k = 0; k < times.size(); ++k)
    for (auto& rows : by_analysis) out.push_back(std::move(rows[k]));
  return out;
}

Table test_table(const std::vector<TestRow>& rows, const std::vector<std::string>& groups) {
  Table t;
  t.header = {"analysis", "parameter", "t0", "component", "group1", "estimate1", "lower1", "upper1", "group2",
              "estimate2", "lower2", "upper2", "statistic", "df", "p_value"};
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.result.group1.size(); ++i) {
      const auto& a = r.result.group1[i];
      const auto& b = r.result.group2[i];
      t.add({r.analysis, r.parameter, format_real(r.result.t0), a.label, groups.at(0), format_real(a.estimate),
             format_real(a.lower), format_real(a.upper), groups.at(1), format_real(b.estimate), format_real(b.lower),
             format_real(b.upper), format_real(r.result.statistic), std::to_string(r.result.df),
             format_real(r.result.p_value)});
    }
  return t;
}

std::string test_summary(const std::vector<TestRow>& rows, const std::vector<std::string>& groups) {
  const auto name_of = [](const TestRow& r, std::size_t i) {
    return r.result.group1.size() > 1 ? r.analysis + " " + r.result.group1[i].label : r.analysis;
  };
  int width = 8;
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.result.group1.size(); ++i)
      width = std::max(width, static_cast<int>(name_of(r, i).size()));
  const auto cell = [](const GroupEstimate& g) {
    return fixed2(g.estimate) + " (" + fixed2(g.lower) + ", " + fixed2(g.upper) + ")";
  };
  std::ostringstream out;
  char line[1024];
  std::snprintf(line, sizeof line, "%-*s %8s  %-22s  %-22s  %s\n", width, "analysis", "t0", groups.at(0).c_str(),
                groups.at(1).c_str(), "p");
  out << line;
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.result.group1.size(); ++i) {
      std::snprintf(line, sizeof line, "%-*s %8g  %-22s  %-22s  %s\n", width, name_of(r, i).c_str(), r.result.t0,
                    cell(r.result.group1[i]).c_str(), cell(r.result.group2[i]).c_str(),
                    i == 0 ? p_text(r.result.p_value).c_str() : "");
      out << line;
    }
  return out.str();
}

Table estimate_table(const RunConfig& cfg, const EventLog& log) {
  if (cfg.analyses.empty()) throw UsageError("no parameter to estimate (set 'parameter' or 'analyses')");
  const auto times = sorted_times(cfg);
  const auto schema = resolve_transitions(cfg, log);
  Table t;
  t.header = {"analysis", "group", "time", "component", "estimate", "lower", "upper"};
  for (const auto& group : resolve_groups(cfg, log)) {
    const auto cs = build_counting_system(filter_group(log, group), schema);
    for (const auto& a : cfg.analyses) {
      const auto hz = analysis_hazards(cfg, a, cs);
      const auto path = solve_plugin(a.spec.definition, hz, times.back());
      std::vector<double> at = path.grid;
      at.insert(at.end(), times.begin(), times.end());
      std::sort(at.begin(), at.end());
      at.erase(std::unique(at.begin(), at.end()), at.end());
      const double n = static_cast<double>(path.n);
      for (double time : at) {
        const bool on_grid = std::binary_search(path.grid.begin(), path.grid.end(), time);
        const auto [x, v] = evaluate_at(on_grid ? path : solve_plugin(a.spec.definition, hz, time), time);
        for (Eigen::Index i = 0; i < x.size(); ++i) {
          const double se = std::sqrt(std::max(v(i, i), 0.0) / n);
          const auto label = path.labels.at(static_cast<std::size_t>(i));
          t.add({a.name, group, format_real(time), label, format_real(x(i)), format_real(x(i) - kWaldZ * se),
                 format_real(x(i) + kWaldZ * se)});
        }
      }
    }
  }
  return t;
}

CsvSchema simulation_csv_schema(StateModel model) {
  CsvSchema s;
  if (model == StateModel::kRecurrent) s.recurrent_codes = {3};
  return s;
}

EventLog simulate_log(const RunConfig& cfg) {
  HazardScenario scenario = cfg.scenario;
  if (cfg.kappa)
    scenario = calibrate_kappa(scenario, parameter_spec(cfg.scenario_parameter), cfg.power.t0, *cfg.kappa);
  auto [log, g2] = simulate_groups(scenario, cfg.simulate_n, cfg.simulate_censoring, cfg.power.censoring_scheme, cfg.seed);
  log.insert(log.end(), std::make_move_iterator(g2.begin()), std::make_move_iterator(g2.end()));
  return log;
}

PowerCurve run_power(const RunConfig& cfg) {
  return power_curve(cfg.scenario, parameter_spec(cfg.scenario_parameter), cfg.tests, cfg.kappas, cfg.power);
}

Table power_table(const PowerCurve& curve) {
  Table t;
  t.header = {"kappa", "test", "n_per_group", "replications", "failures", "level", "rate", "std_error", "flagged"};
  for (const auto& p : curve.points)
    t.add({format_real(p.kappa), to_string(p.test), std::to_string(p.n_per_group), std::to_string(p.replications),
           std::to_string(p.failures), format_real(p.level), format_real(p.rate), format_real(p.std_error),
           p.flagged ? "1" : "0"});
  return t;
}

namespace {

EventLog load_data(const RunConfig& cfg) {
  if (cfg.data_path.empty()) throw UsageError("no input data (set data.path or --data)");
  return ingest_csv(cfg.data_path, cfg.csv);
}

}  // namespace

void run_estimate(const RunConfig& cfg) { emit(estimate_table(cfg, load_data(cfg)), cfg.output); }

void run_test(const RunConfig& cfg) {
  const auto log = load_data(cfg);
  const auto rows = run_tests(cfg, log);
  const auto groups = resolve_groups(cfg, log);
  emit(test_table(rows, groups), cfg.output);
  const std::string text = test_summary(rows, groups);
  if (cfg.summary.empty()) {
    std::cerr << text;
  } else if (cfg.summary == "-") {
    std::cout << text;
  } else {
    std::ofstream out(cfg.summary);
    if (!out) throw IoError("cannot write '" + cfg.summary + "'");
    out << text;
  }
}

void run_simulate(const RunConfig& cfg) {
  const auto log = simulate_log(cfg);
  const auto schema = simulation_csv_schema(cfg.scenario.model);
  if (cfg.output.empty() || cfg.output == "-") {
    write_event_log(std::cout, log, schema);
    return;
  }
  std::ofstream out(cfg.output);
  if (!out) throw IoError("cannot write '" + cfg.output + "'");
  write_event_log(out, log, schema);
}

void run_power_command(const RunConfig& cfg) {
  const auto curve = run_power(cfg);
  emit(power_table(curve), cfg.output);
  for (const auto& p : curve.points)
    if (p.flagged)
      std::cerr << "warning: kappa " << p.kappa << ", " << to_string(p.test) << ": " << p.failures << " of "
                << p.replications << " replications failed\n";
}

}  // namespace survode
