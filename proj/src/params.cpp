#include "survode/params.hpp"

#include <algorithm>

#include "survode/error.hpp"

namespace survode {

namespace {

constexpr double kSlack = 1e-12;

bool in_unit(double v) { return v >= -kSlack && v <= 1.0 + kSlack; }

Eigen::MatrixXd mat2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

// X = (S, Y) with dS = -S dA_1 and dY = S dA_2; shared by rmst, cuminc and
// mean frequency.
ParameterDefinition survival_pair(std::string second_label, bool second_is_time) {
  ParameterDefinition d;
  d.p = 2;
  d.q = 2;
  d.x0 = Eigen::Vector2d(1.0, 0.0);
  d.F = [](const Eigen::VectorXd& x) { return mat2(-x(0), 0.0, 0.0, x(0)); };
  d.jacobians = {
      [](const Eigen::VectorXd&) { return mat2(-1.0, 0.0, 0.0, 0.0); },
      [](const Eigen::VectorXd&) { return mat2(0.0, 0.0, 1.0, 0.0); },
  };
  d.lebesgue_mask = {false, second_is_time};
  d.labels = {"S", std::move(second_label)};
  return d;
}

}  // namespace

std::vector<Transition> ParameterSpec::transitions() const {
  std::vector<Transition> out;
  for (const auto& c : hazard_schema)
    for (const auto& term : c.terms)
      for (const auto& t : term.transitions)
        if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
  return out;
}

ParameterSpec survival_spec() {
  ParameterSpec s;
  s.name = "survival";
  auto& d = s.definition;
  d.p = 1;
  d.q = 1;
  d.x0 = Eigen::VectorXd::Ones(1);
  d.F = [](const Eigen::VectorXd& x) { return Eigen::MatrixXd::Constant(1, 1, -x(0)); };
  d.jacobians = {[](const Eigen::VectorXd&) { return Eigen::MatrixXd::Constant(1, 1, -1.0); }};
  d.lebesgue_mask = {false};
  d.labels = {"S"};
  d.admissible = [](const Eigen::VectorXd& x) { return in_unit(x(0)); };
  s.estimand_indices = {0};
  s.hazard_schema = {HazardComponent::of("death", {{0, 1}})};
  return s;
}

ParameterSpec rmst_spec() {
  ParameterSpec s;
  s.name = "rmst";
  s.definition = survival_pair("R", true);
  s.definition.admissible = [](const Eigen::VectorXd& x) { return in_unit(x(0)) && x(1) >= -kSlack; };
  s.estimand_indices = {1};
  s.hazard_schema = {HazardComponent::of("death", {{0, 1}}), HazardComponent::time()};
  return s;
}

ParameterSpec cuminc_spec(State cause, std::vector<State> competing) {
  if (cause == 0 || std::find(competing.begin(), competing.end(), cause) != competing.end() ||
      std::find(competing.begin(), competing.end(), 0) != competing.end())
    throw Error("params", "cause and competing states must be distinct and nonzero");
  ParameterSpec s;
  s.name = "cuminc";
  s.definition = survival_pair("C", false);
  s.definition.admissible = [](const Eigen::VectorXd& x) { return in_unit(x(0)) && in_unit(x(1)); };
  s.estimand_indices = {1};
  std::vector<Transition> all{{0, cause}};
  for (auto c : competing) all.push_back({0, c});
  s.hazard_schema = {HazardComponent::of("all-cause", all),
                     HazardComponent::of("cause " + std::to_string(cause), {{0, cause}})};
  return s;
}

ParameterSpec mean_frequency_spec() {
  ParameterSpec s;
  s.name = "mean_frequency";
  s.definition = survival_pair("K", false);
  s.definition.admissible = [](const Eigen::VectorXd& x) { return in_unit(x(0)) && x(1) >= -kSlack; };
  s.estimand_indices = {1};
  s.hazard_schema = {HazardComponent::of("death", {{0, 1}}), HazardComponent::of("recurrent", {{0, 0}})};
  return s;
}

ParameterSpec prevalence_spec() {
  ParameterSpec s;
  s.name = "prevalence";
  auto& d = s.definition;
  d.p = 2;
  d.q = 3;
  d.x0 = Eigen::Vector2d(1.0, 0.0);
  d.F = [](const Eigen::VectorXd& x) {
    Eigen::MatrixXd f(2, 3);
    f << -x(0), -x(0), 0.0,
          x(0),   0.0, -x(1);
    return f;
  };
  d.jacobians = {
      [](const Eigen::VectorXd&) { return mat2(-1.0, 0.0, 1.0, 0.0); },
      [](const Eigen::VectorXd&) { return mat2(-1.0, 0.0, 0.0, 0.0); },
      [](const Eigen::VectorXd&) { return mat2(0.0, 0.0, 0.0, -1.0); },
  };
  d.lebesgue_mask = {false, false, false};
  d.labels = {"P0", "P1"};
  d.admissible = [](const Eigen::VectorXd& x) {
    return in_unit(x(0)) && in_unit(x(1)) && x(0) + x(1) <= 1.0 + kSlack;
  };
  s.estimand_indices = {1};
  s.hazard_schema = {HazardComponent::of("0->1", {{0, 1}}), HazardComponent::of("0->2", {{0, 2}}),
                     HazardComponent::of("1->2", {{1, 2}})};
  return s;
}

const std::vector<std::string>& parameter_names() {
  static const std::vector<std::string> names{"survival", "rmst", "cuminc", "mean_frequency", "prevalence"};
  return names;
}

ParameterSpec parameter_spec(const std::string& name) {
  if (name == "survival") return survival_spec();
  if (name == "rmst") return rmst_spec();
  if (name == "cuminc") return cuminc_spec();
  if (name == "mean_frequency") return mean_frequency_spec();
  if (name == "prevalence") return prevalence_spec();
  throw Error("params", "unknown parameter '" + name + "'");
}

HazardPath estimate_hazards(const CountingSystem& cs, const ParameterSpec& spec, Covariation covariation) {
  if (spec.hazard_schema.size() != spec.definition.q)
    throw Error("params", "hazard schema of '" + spec.name + "' has " +
                              std::to_string(spec.hazard_schema.size()) + " components, F has " +
                              std::to_string(spec.definition.q));
  return nelson_aalen(cs, spec.hazard_schema, covariation);
}

}  // namespace survode
