#include "survode/ode.hpp"

#include <algorithm>
#include <cmath>

#include "survode/error.hpp"

namespace survode {

void ParameterDefinition::check() const {
  if (p == 0 || q == 0) throw SolveError("parameter dimensions must be positive");
  if (static_cast<std::size_t>(x0.size()) != p) throw SolveError("x0 has wrong length");
  if (!F) throw SolveError("coefficient field F missing");
  if (jacobians.size() != q) throw SolveError("need one Jacobian per hazard component");
  if (lebesgue_mask.size() != q) throw SolveError("Lebesgue mask has wrong length");
}

namespace {

void require_shape(const Eigen::MatrixXd& m, Eigen::Index rows, Eigen::Index cols, const char* what,
                   std::size_t step) {
  if (m.rows() != rows || m.cols() != cols)
    throw SolveError(std::string(what) + " has shape " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()) + " at step " + std::to_string(step));
  if (!m.allFinite())
    throw SolveError(std::string(what) + " is not finite at step " + std::to_string(step));
}

}  // namespace

PluginPath solve_plugin(const ParameterDefinition& def, const HazardPath& hz, double t0) {
  def.check();
  const auto p = static_cast<Eigen::Index>(def.p);
  return solve_variance(def, hz, t0, Eigen::MatrixXd::Zero(p, p));
}

PluginPath solve_variance(const ParameterDefinition& def, const HazardPath& hz, double t0,
                          const Eigen::MatrixXd& v0) {
  def.check();
  const auto p = static_cast<Eigen::Index>(def.p);
  const auto q = static_cast<Eigen::Index>(def.q);
  if (hz.q() != def.q)
    throw SolveError("hazard path has " + std::to_string(hz.q()) + " components, parameter needs " +
                     std::to_string(def.q));
  if (hz.lebesgue_mask != def.lebesgue_mask)
    throw SolveError("Lebesgue components of hazard path and parameter differ");
  if (!(t0 > 0.0) || !std::isfinite(t0)) throw SolveError("t0 must be positive and finite");
  if (v0.rows() != p || v0.cols() != p) throw SolveError("v0 must be p x p");
  if (!v0.isApprox(v0.transpose(), 1e-12) && v0.norm() > 0.0) throw SolveError("v0 must be symmetric");

  PluginPath out;
  out.n = hz.n;
  out.labels = def.labels;
  out.x0 = def.x0;
  out.x0_variance = v0;

  const auto last_jump = std::upper_bound(hz.jump_grid.begin(), hz.jump_grid.end(), t0);
  const auto jumps = static_cast<std::size_t>(last_jump - hz.jump_grid.begin());
  out.grid.assign(hz.jump_grid.begin(), last_jump);
  if (out.grid.empty() || out.grid.back() < t0) out.grid.push_back(t0);
  out.X.reserve(out.grid.size());
  out.V.reserve(out.grid.size());

  const double n = static_cast<double>(hz.n);
  Eigen::VectorXd x = def.x0;
  Eigen::MatrixXd v = v0;
  Eigen::VectorXd delta(q);
  Eigen::MatrixXd dB(q, q);
  double previous = 0.0;
  for (std::size_t k = 0; k < out.grid.size(); ++k) {
    const double t = out.grid[k];
    if (k < jumps) {
      delta = hz.dA.row(static_cast<Eigen::Index>(k)).transpose();
      dB = hz.dB[k];
    } else {
      delta.setZero();
      dB.setZero();
    }
    for (Eigen::Index j = 0; j < q; ++j)
      if (def.lebesgue_mask[static_cast<std::size_t>(j)]) {
        delta(j) = t - previous;
        dB.row(j).setZero();
        dB.col(j).setZero();
      }

    const Eigen::MatrixXd f = def.F(x);
    require_shape(f, p, q, "F", k);
    Eigen::MatrixXd dv = n * f * dB * f.transpose();
    for (Eigen::Index j = 0; j < q; ++j) {
      if (delta(j) == 0.0) continue;
      const Eigen::MatrixXd jac = def.jacobians[static_cast<std::size_t>(j)](x);
      require_shape(jac, p, p, "Jacobian", k);
      dv += (v * jac.transpose() + jac * v) * delta(j);
    }
    x += f * delta;
    v += dv;
    v = 0.5 * (v + v.transpose()).eval();
    if (!x.allFinite() || !v.allFinite())
      throw SolveError("non-finite state at step " + std::to_string(k) + " (t = " + std::to_string(t) + ")");
    if (def.admissible && !def.admissible(x)) ++out.excursions;
    out.X.push_back(x);
    out.V.push_back(v);
    previous = t;
  }
  return out;
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> evaluate_at(const PluginPath& path, double t) {
  if (t < 0.0) throw SolveError("evaluation time before 0");
  if (t > path.horizon()) throw SolveError("evaluation time " + std::to_string(t) + " beyond solved horizon " +
                                           std::to_string(path.horizon()));
  const auto it = std::upper_bound(path.grid.begin(), path.grid.end(), t);
  if (it == path.grid.begin()) return {path.x0, path.x0_variance};
  const auto k = static_cast<std::size_t>(it - path.grid.begin()) - 1;
  return {path.X[k], path.V[k]};
}

}  // namespace survode
