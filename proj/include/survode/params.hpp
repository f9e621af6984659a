#pragma once

#include <string>
#include <vector>

#include "survode/hazard.hpp"
#include "survode/ode.hpp"

namespace survode {

/// A ready-to-use parameter: its ODE, the components of X tested by default,
/// and which transitions feed each hazard component.
///
/// State conventions of the built-ins:
///   survival, rmst        0 alive, 1 dead
///   cuminc                0 event-free, 1 event of interest, 2.. competing
///   mean_frequency        0 alive (recurrent events are 0->0), 1 dead
///   prevalence            0 healthy, 1 ill, 2 dead
struct ParameterSpec {
  std::string name;
  ParameterDefinition definition;
  std::vector<std::size_t> estimand_indices;
  std::vector<HazardComponent> hazard_schema;

  /// Every transition referenced by the schema, without duplicates.
  std::vector<Transition> transitions() const;
};

/// S with dS = -S dA.
ParameterSpec survival_spec();
/// (S, R) with dR = S dt.
ParameterSpec rmst_spec();
/// (S, C) with dC = S dA_cause; the all-cause hazard pools 0->cause and 0->c for each competing c.
ParameterSpec cuminc_spec(State cause = 1, std::vector<State> competing = {2});
/// (S, K) with dK = S dA_recurrent; hazards ordered (death, recurrent).
ParameterSpec mean_frequency_spec();
/// (P0, P1) of the irreversible illness-death model; hazards (0->1, 0->2, 1->2).
ParameterSpec prevalence_spec();

/// Lookup by name: survival, rmst, cuminc, mean_frequency, prevalence.
ParameterSpec parameter_spec(const std::string& name);
const std::vector<std::string>& parameter_names();

/// Nelson-Aalen hazards for the spec's schema on `cs`.
HazardPath estimate_hazards(const CountingSystem& cs, const ParameterSpec& spec,
                            Covariation covariation = Covariation::kJumpProducts);

}  // namespace survode
