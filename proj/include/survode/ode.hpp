#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "survode/hazard.hpp"

namespace survode {

/// A parameter X solving dX = F(X) dA with X(0) = x0.
///
/// `jacobians[j](x)` is the p x p Jacobian of column j of F.
struct ParameterDefinition {
  using Field = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

  std::size_t p = 0;
  std::size_t q = 0;
  Eigen::VectorXd x0;
  Field F;
  std::vector<Field> jacobians;
  std::vector<bool> lebesgue_mask;
  std::vector<std::string> labels;
  /// Optional: returns false for states outside the natural range of X.
  std::function<bool(const Eigen::VectorXd&)> admissible;

  /// Throws SolveError when shapes are inconsistent.
  void check() const;
};

/// Joint trajectory of the plugin estimate X and its covariance V.
///
/// Entry k holds the values after the step at grid[k]. Values before the
/// first grid point are x0 and v0.
struct PluginPath {
  std::vector<double> grid;
  std::vector<Eigen::VectorXd> X;
  std::vector<Eigen::MatrixXd> V;
  Eigen::VectorXd x0;
  Eigen::MatrixXd x0_variance;
  std::vector<std::string> labels;
  std::size_t n = 0;
  /// Number of grid points whose X left the admissible region.
  std::size_t excursions = 0;

  double horizon() const { return grid.empty() ? 0.0 : grid.back(); }
};

/// Euler/difference scheme for X on the jump grid of `hz` up to t0, with t0
/// appended as the last point. V starts at zero.
PluginPath solve_plugin(const ParameterDefinition& def, const HazardPath& hz, double t0);

/// As solve_plugin, with V stepped jointly from v0.
PluginPath solve_variance(const ParameterDefinition& def, const HazardPath& hz, double t0,
                          const Eigen::MatrixXd& v0);

/// Right-continuous lookup of (X, V) at t in [0, horizon]. Between grid points
/// this holds the last value, so a time component is exact only on the grid;
/// solve to t itself to evaluate such parameters elsewhere.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> evaluate_at(const PluginPath& path, double t);

}  // namespace survode
