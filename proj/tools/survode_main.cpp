// survode: estimate, test and simulate plugin estimators of survival parameters.
#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "survode/commands.hpp"
#include "survode/error.hpp"

namespace {

using json = nlohmann::json;

struct Flags {
  std::string config;
  std::string data;
  std::string output;
  std::string summary;
  std::string parameter;
  std::vector<double> times;
  std::vector<double> kappas;
  std::vector<std::string> tests;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t replications = 0;
  unsigned threads = 0;
  double level = 0.0;
};

// Flag values replace the corresponding config entries.
json merged_config(const Flags& f, const std::string& command, CLI::App& sub) {
  json j = f.config.empty() ? json::object() : survode::load_config_json(f.config);
  const auto given = [&](const char* name) {
    const auto* opt = sub.get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (given("--data")) j["data"]["path"] = std::filesystem::absolute(f.data).string();
  if (given("--output")) j["output"] = f.output;
  if (given("--summary")) j["summary"] = f.summary;
  if (given("--seed")) j["seed"] = f.seed;
  if (given("--level")) j["level"] = f.level;
  if (given("--parameter")) {
    if (command == "simulate" || command == "power") j["scenario"]["parameter"] = f.parameter;
    else {
      j.erase("analyses");
      j["parameter"] = f.parameter;
    }
  }
  if (given("--t0")) {
    if (command == "power") j["power"]["t0"] = f.times.front();
    else {
      j.erase("t0");
      j["times"] = f.times;
    }
  }
  if (given("--n")) j[command == "power" ? "power" : "simulate"]["n_per_group"] = f.n;
  if (given("--replications")) j["power"]["replications"] = f.replications;
  if (given("--threads")) j["power"]["threads"] = f.threads;
  if (given("--tests")) j["power"]["tests"] = f.tests;
  if (given("--kappa")) {
    if (command == "simulate") j["simulate"]["kappa"] = f.kappas.front();
    else j["power"]["kappas"] = f.kappas;
  }
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plugin estimators and two-sample tests for survival, multistate and recurrent-event parameters"};
  app.require_subcommand(1);
  Flags f;

  const auto common = [&](CLI::App* s) {
    s->add_option("-c,--config", f.config, "JSON configuration file")->check(CLI::ExistingFile);
    s->add_option("-o,--output", f.output, "output CSV (default: stdout)");
    s->add_option("--seed", f.seed, "random seed");
    s->add_option("--parameter", f.parameter, "survival | rmst | cuminc | mean_frequency | prevalence");
    s->add_option("--level", f.level, "significance level");
  };
  auto* estimate = app.add_subcommand("estimate", "plugin estimates with pointwise 95% intervals");
  auto* test = app.add_subcommand("test", "two-sample plugin tests at t0");
  auto* simulate = app.add_subcommand("simulate", "write a synthetic two-group event file");
  auto* power = app.add_subcommand("power", "Monte Carlo rejection rates");
  for (auto* s : {estimate, test, simulate, power}) common(s);
  for (auto* s : {estimate, test}) {
    s->add_option("--data", f.data, "long-format event CSV");
    s->add_option("--t0", f.times, "evaluation time(s)");
  }
  test->add_option("--summary", f.summary, "summary table path ('-' for stdout, default stderr)");
  simulate->add_option("--n", f.n, "subjects per group");
  simulate->add_option("--kappa", f.kappas, "calibrate group 2 to this difference")->expected(1);
  power->add_option("--n", f.n, "subjects per group");
  power->add_option("--t0", f.times, "time of the comparison")->expected(1);
  power->add_option("--kappa", f.kappas, "target differences");
  power->add_option("--replications", f.replications, "Monte Carlo replications");
  power->add_option("--threads", f.threads, "worker threads (0: all cores)");
  power->add_option("--tests", f.tests, "plugin | logrank | greenwood");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  try {
    const json j = merged_config(f, command, *sub);
    const auto base = f.config.empty() ? std::filesystem::path{} : std::filesystem::path(f.config).parent_path();
    const auto cfg = survode::parse_config(j, base);
    if (command == "estimate") survode::run_estimate(cfg);
    else if (command == "test") survode::run_test(cfg);
    else if (command == "simulate") survode::run_simulate(cfg);
    else survode::run_power_command(cfg);
  } catch (const survode::UsageError& e) {
    std::cerr << "survode " << command << ": " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "survode " << command << ": usage: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "survode " << command << ": " << e.what() << '\n';
    return 2;
  }
  return 0;
}
