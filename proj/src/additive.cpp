#include <Eigen/QR>
#include <algorithm>
#include <set>

#include "survode/error.hpp"
#include "survode/hazard.hpp"

namespace survode {

bool AdditiveModelFit::outside_range(const Eigen::VectorXd& z0) const {
  for (Eigen::Index j = 0; j < z0.size(); ++j)
    if (z0(j) < covariate_min(j) || z0(j) > covariate_max(j)) return true;
  return false;
}

AdditiveModelFit fit_additive(const CountingSystem& cs, const Eigen::MatrixXd& covariates,
                              const HazardTerm& term, RankPolicy policy) {
  if (static_cast<std::size_t>(covariates.rows()) != cs.subjects.size())
    throw EstimationError("covariate matrix has " + std::to_string(covariates.rows()) +
                          " rows for " + std::to_string(cs.subjects.size()) + " subjects");
  if (term.transitions.empty()) throw EstimationError("hazard term without transitions");

  std::vector<std::size_t> idx;
  std::set<State> origins;
  for (const auto& t : term.transitions) {
    idx.push_back(cs.index_of(t));
    origins.insert(t.from);
  }
  const auto c = covariates.cols();
  const auto n = static_cast<Eigen::Index>(cs.subjects.size());

  AdditiveModelFit fit;
  fit.n = cs.n;
  if (n > 0 && c > 0) {
    fit.covariate_min = covariates.colwise().minCoeff().transpose();
    fit.covariate_max = covariates.colwise().maxCoeff().transpose();
  } else {
    fit.covariate_min = Eigen::VectorXd::Zero(c);
    fit.covariate_max = Eigen::VectorXd::Zero(c);
  }

  for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(cs.size()); ++k) {
    int total = 0;
    for (auto j : idx) total += cs.dN(k, static_cast<Eigen::Index>(j));
    if (total == 0) continue;
    const double t = cs.jump_grid[static_cast<std::size_t>(k)];

    std::vector<Eigen::Index> risk;
    Eigen::VectorXd dn_all = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& subject = cs.subjects[static_cast<std::size_t>(i)];
      const auto s = subject.state_before(t);
      if (!s || !origins.count(*s)) continue;
      risk.push_back(i);
      for (const auto& [time, j] : subject.jumps)
        if (time == t && std::find(idx.begin(), idx.end(), j) != idx.end()) dn_all(i) += 1.0;
    }
    const auto m = static_cast<Eigen::Index>(risk.size());
    if (m == 0)
      throw EstimationError("events with empty risk set at time " + std::to_string(t));

    Eigen::VectorXd inc = Eigen::VectorXd::Zero(c + 1);
    bool skip = false;
    if (c == 0) {
      inc(0) = static_cast<double>(total) / static_cast<double>(m);
    } else {
      Eigen::MatrixXd X(m, c + 1);
      Eigen::VectorXd dn(m);
      for (Eigen::Index r = 0; r < m; ++r) {
        X(r, 0) = 1.0;
        X.row(r).tail(c) = covariates.row(risk[static_cast<std::size_t>(r)]);
        dn(r) = dn_all(risk[static_cast<std::size_t>(r)]);
      }
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
      if (qr.rank() < c + 1) {
        if (policy == RankPolicy::kThrow)
          throw EstimationError("rank-deficient at-risk design at time " + std::to_string(t));
        skip = true;
      } else {
        inc = qr.solve(dn);
      }
    }
    fit.jump_grid.push_back(t);
    fit.increments.push_back(std::move(inc));
    fit.skipped.push_back(skip);
    if (skip) ++fit.skipped_count;
  }
  return fit;
}

HazardPath additive_hazard(const CountingSystem& cs, const Eigen::MatrixXd& covariates,
                           const Eigen::VectorXd& z0, std::span<const HazardComponent> components,
                           RankPolicy policy) {
  if (z0.size() != covariates.cols())
    throw EstimationError("z0 has " + std::to_string(z0.size()) + " entries for " +
                          std::to_string(covariates.cols()) + " covariates");
  const std::size_t q = components.size();
  if (q == 0) throw EstimationError("no hazard components requested");

  std::vector<std::vector<AdditiveModelFit>> fits(q);
  std::set<double> times;
  for (std::size_t i = 0; i < q; ++i) {
    if (components[i].lebesgue) continue;
    if (components[i].terms.empty())
      throw EstimationError("component '" + components[i].label + "' has no terms");
    for (const auto& term : components[i].terms) {
      fits[i].push_back(fit_additive(cs, covariates, term, policy));
      times.insert(fits[i].back().jump_grid.begin(), fits[i].back().jump_grid.end());
    }
  }

  HazardPath path;
  path.n = cs.n;
  path.jump_grid.assign(times.begin(), times.end());
  const auto K = static_cast<Eigen::Index>(path.jump_grid.size());
  const auto Q = static_cast<Eigen::Index>(q);
  path.dA = Eigen::MatrixXd::Zero(K, Q);
  path.events = Eigen::MatrixXi::Zero(K, Q);
  Eigen::VectorXd level(z0.size() + 1);
  level << 1.0, z0;
  for (std::size_t i = 0; i < q; ++i) {
    path.lebesgue_mask.push_back(components[i].lebesgue);
    path.labels.push_back(components[i].label);
    path.may_decrease.push_back(!components[i].lebesgue && z0.size() > 0);
    for (const auto& fit : fits[i]) {
      path.skipped_increments += fit.skipped_count;
      if (fit.outside_range(z0)) path.extrapolated = true;
      for (std::size_t k = 0; k < fit.jump_grid.size(); ++k) {
        const auto r = std::lower_bound(path.jump_grid.begin(), path.jump_grid.end(), fit.jump_grid[k]) -
                       path.jump_grid.begin();
        path.dA(r, static_cast<Eigen::Index>(i)) += level.dot(fit.increments[k]);
      }
    }
  }
  // Event counts for diagnostics, matching the Nelson-Aalen layout.
  for (std::size_t i = 0; i < q; ++i)
    for (const auto& term : components[i].terms)
      for (const auto& t : term.transitions) {
        const auto j = static_cast<Eigen::Index>(cs.index_of(t));
        for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(cs.size()); ++k) {
          const int dn = cs.dN(k, j);
          if (dn == 0) continue;
          const auto r = std::lower_bound(path.jump_grid.begin(), path.jump_grid.end(),
                                          cs.jump_grid[static_cast<std::size_t>(k)]) -
                         path.jump_grid.begin();
          path.events(r, static_cast<Eigen::Index>(i)) += dn;
        }
      }
  path.dB.reserve(path.jump_grid.size());
  for (Eigen::Index r = 0; r < K; ++r) {
    const Eigen::VectorXd d = path.dA.row(r).transpose();
    path.dB.push_back(d * d.transpose());
  }
  return path;
}

HazardPath additive_hazard(const CountingSystem& cs, const Eigen::MatrixXd& covariates,
                           const Eigen::VectorXd& z0, RankPolicy policy) {
  const HazardComponent component = HazardComponent::of(to_string(cs.schema.at(0)), {cs.schema.at(0)});
  return additive_hazard(cs, covariates, z0, std::span<const HazardComponent>(&component, 1), policy);
}

}  // namespace survode
