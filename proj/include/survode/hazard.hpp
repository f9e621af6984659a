#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "survode/events.hpp"

namespace survode {

/// Estimator of the quadratic covariation increments dB.
enum class Covariation {
  /// dB = dA_c dA_c^T, the product of the jumps of the estimated hazards.
  kJumpProducts,
  /// dB_ij = sum over shared transitions of dN / (Y_i Y_j). Agrees with
  /// kJumpProducts when no events are tied; with ties it equals the limit of
  /// breaking them by an infinitesimal jitter.
  kOptional,
};

/// Nelson-Aalen hazard of a set of transitions, at risk = subjects occupying
/// any origin state of the set.
struct HazardTerm {
  std::vector<Transition> transitions;
};

/// A hazard component is a sum of terms, or Lebesgue time (dA = dt).
struct HazardComponent {
  std::string label;
  std::vector<HazardTerm> terms;
  bool lebesgue = false;

  static HazardComponent of(std::string label, std::vector<Transition> transitions) {
    return {std::move(label), {HazardTerm{std::move(transitions)}}, false};
  }
  static HazardComponent time(std::string label = "time") { return {std::move(label), {}, true}; }
};

/// q-component cumulative hazard step function, stored sparsely at its jumps.
///
/// Lebesgue components carry zero columns in dA and zero rows/columns in dB;
/// their increments are realised as grid spacings by the ODE solver.
struct HazardPath {
  std::vector<double> jump_grid;
  Eigen::MatrixXd dA;               // K x q
  std::vector<Eigen::MatrixXd> dB;  // K entries of q x q
  std::vector<bool> lebesgue_mask;
  std::vector<std::string> labels;
  std::size_t n = 0;

  // Diagnostics.
  Eigen::MatrixXi events;  // K x q counted transitions per component
  std::vector<bool> may_decrease;  // additive-model components can have negative increments
  std::size_t skipped_increments = 0;
  bool extrapolated = false;

  std::size_t q() const { return lebesgue_mask.size(); }
  std::size_t size() const { return jump_grid.size(); }

  /// Cumulative hazard at t (right-continuous); Lebesgue entries are t.
  Eigen::VectorXd cumulative(double t) const;
};

/// Nelson-Aalen estimates, one column per component. `component_map[i]` lists
/// the schema indices pooled into component i.
HazardPath nelson_aalen(const CountingSystem& cs,
                        const std::vector<std::vector<std::size_t>>& component_map,
                        Covariation covariation = Covariation::kJumpProducts);

HazardPath nelson_aalen(const CountingSystem& cs, std::span<const HazardComponent> components,
                        Covariation covariation = Covariation::kJumpProducts);

/// Inserts Lebesgue components so that they occupy `positions` in the result.
HazardPath attach_lebesgue(const HazardPath& path, const std::vector<std::size_t>& positions);

// Aalen's additive hazards model ------------------------------------------

enum class RankPolicy { kSkip, kThrow };

/// Least-squares increments of Aalen's additive model for one term.
struct AdditiveModelFit {
  std::vector<double> jump_grid;
  std::vector<Eigen::VectorXd> increments;  // intercept followed by covariates
  std::vector<bool> skipped;
  std::size_t skipped_count = 0;
  std::size_t n = 0;
  Eigen::VectorXd covariate_min;
  Eigen::VectorXd covariate_max;

  std::size_t covariate_count() const { return static_cast<std::size_t>(covariate_min.size()); }
  bool outside_range(const Eigen::VectorXd& z0) const;
};

/// `covariates` rows follow `cs.subjects`.
AdditiveModelFit fit_additive(const CountingSystem& cs, const Eigen::MatrixXd& covariates,
                              const HazardTerm& term, RankPolicy policy = RankPolicy::kSkip);

/// Hazards conditional on covariate level z0, one column per component.
HazardPath additive_hazard(const CountingSystem& cs, const Eigen::MatrixXd& covariates,
                           const Eigen::VectorXd& z0, std::span<const HazardComponent> components,
                           RankPolicy policy = RankPolicy::kSkip);

/// Single-component convenience over schema index 0.
HazardPath additive_hazard(const CountingSystem& cs, const Eigen::MatrixXd& covariates,
                           const Eigen::VectorXd& z0, RankPolicy policy = RankPolicy::kSkip);

}  // namespace survode
