#include "survode/testing.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <set>

#include "survode/error.hpp"

namespace survode {

double chi2_sf(double x, std::size_t df) {
  if (df == 0) throw TestError("chi-square needs df >= 1");
  if (std::isnan(x)) throw TestError("chi-square statistic is NaN");
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(0.5 * static_cast<double>(df), 0.5 * x);
}

namespace {

std::vector<GroupEstimate> group_estimates(const Eigen::VectorXd& x, const Eigen::MatrixXd& v, double n,
                                           const std::vector<std::size_t>& indices,
                                           const std::vector<std::string>& labels) {
  std::vector<GroupEstimate> out;
  for (auto i : indices) {
    const auto ii = static_cast<Eigen::Index>(i);
    GroupEstimate g;
    g.component = i;
    g.label = i < labels.size() ? labels[i] : "X" + std::to_string(i);
    g.estimate = x(ii);
    g.std_error = std::sqrt(std::max(v(ii, ii), 0.0) / n);
    g.lower = g.estimate - kWaldZ * g.std_error;
    g.upper = g.estimate + kWaldZ * g.std_error;
    out.push_back(g);
  }
  return out;
}

// Pooled number at risk for a set of transitions: subjects in any origin state.
int pooled_at_risk(const CountingSystem& cs, const std::vector<std::size_t>& transitions, double t) {
  std::set<State> origins;
  for (auto j : transitions) origins.insert(cs.schema[j].from);
  int y = 0;
  for (auto s : origins) y += cs.at_risk(s, t);
  return y;
}

int events_at(const CountingSystem& cs, const std::vector<std::size_t>& transitions, double t) {
  const auto it = std::lower_bound(cs.jump_grid.begin(), cs.jump_grid.end(), t);
  if (it == cs.jump_grid.end() || *it != t) return 0;
  const auto k = it - cs.jump_grid.begin();
  int d = 0;
  for (auto j : transitions) d += cs.dN(k, static_cast<Eigen::Index>(j));
  return d;
}

std::vector<double> event_times(const CountingSystem& cs, const std::vector<std::size_t>& transitions) {
  std::vector<double> times;
  for (std::size_t k = 0; k < cs.size(); ++k) {
    int d = 0;
    for (auto j : transitions) d += cs.dN(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
    if (d > 0) times.push_back(cs.jump_grid[k]);
  }
  return times;
}

void check_transitions(const CountingSystem& cs, const std::vector<std::size_t>& transitions) {
  if (transitions.empty()) throw TestError("no event transitions selected");
  for (auto j : transitions)
    if (j >= cs.schema.size()) throw TestError("event transition index " + std::to_string(j) + " out of range");
}

}  // namespace

TestResult plugin_test(const PluginPath& path1, const PluginPath& path2, double t0,
                       const std::vector<std::size_t>& indices) {
  if (indices.empty()) throw TestError("empty component selection");
  if (path1.n == 0 || path2.n == 0) throw TestError("empty group");
  if (t0 > path1.horizon() || t0 > path2.horizon())
    throw TestError("t0 = " + std::to_string(t0) + " beyond a solved horizon");
  const auto [x1, v1] = evaluate_at(path1, t0);
  const auto [x2, v2] = evaluate_at(path2, t0);
  if (x1.size() != x2.size()) throw TestError("paths have different dimensions");
  std::set<std::size_t> seen;
  for (auto i : indices) {
    if (i >= static_cast<std::size_t>(x1.size()))
      throw TestError("component index " + std::to_string(i) + " out of range");
    if (!seen.insert(i).second) throw TestError("component index " + std::to_string(i) + " repeated");
  }

  const auto r = static_cast<Eigen::Index>(indices.size());
  const double n1 = static_cast<double>(path1.n);
  const double n2 = static_cast<double>(path2.n);
  Eigen::VectorXd d(r);
  Eigen::MatrixXd v(r, r);
  for (Eigen::Index a = 0; a < r; ++a) {
    const auto ia = static_cast<Eigen::Index>(indices[static_cast<std::size_t>(a)]);
    d(a) = x1(ia) - x2(ia);
    for (Eigen::Index b = 0; b < r; ++b) {
      const auto ib = static_cast<Eigen::Index>(indices[static_cast<std::size_t>(b)]);
      v(a, b) = v1(ia, ib) / n1 + v2(ia, ib) / n2;
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(v);
  const auto& lambda = eig.eigenvalues();
  const double largest = lambda.maxCoeff();
  if (!(largest > 0.0) || lambda.minCoeff() / largest < kMinReciprocalCondition)
    throw TestError("covariance at t0 is singular (reciprocal condition < 1e-12); "
                    "test fewer components or choose a later t0");
  const Eigen::VectorXd projected = eig.eigenvectors().transpose() * d;
  double statistic = 0.0;
  for (Eigen::Index i = 0; i < r; ++i) statistic += projected(i) * projected(i) / lambda(i);

  TestResult result;
  result.statistic = statistic;
  result.df = indices.size();
  result.p_value = chi2_sf(statistic, result.df);
  result.t0 = t0;
  result.method = "plugin";
  result.group1 = group_estimates(x1, v1, n1, indices, path1.labels);
  result.group2 = group_estimates(x2, v2, n2, indices, path2.labels);
  return result;
}

TestResult logrank_test(const CountingSystem& cs1, const CountingSystem& cs2,
                        const std::vector<std::size_t>& event_transitions) {
  if (cs1.schema != cs2.schema) throw TestError("groups have different transition schemas");
  check_transitions(cs1, event_transitions);
  std::vector<double> times = event_times(cs1, event_transitions);
  const auto more = event_times(cs2, event_transitions);
  times.insert(times.end(), more.begin(), more.end());
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  if (times.empty()) throw TestError("log-rank test needs at least one event");

  double observed_minus_expected = 0.0;
  double variance = 0.0;
  for (double t : times) {
    const double y1 = pooled_at_risk(cs1, event_transitions, t);
    const double y2 = pooled_at_risk(cs2, event_transitions, t);
    const double d = events_at(cs1, event_transitions, t) + events_at(cs2, event_transitions, t);
    const double y = y1 + y2;
    observed_minus_expected += events_at(cs1, event_transitions, t) - d * y1 / y;
    if (y > 1.0) variance += y1 * y2 * d * (y - d) / (y * y * (y - 1.0));
  }
  if (!(variance > 0.0)) throw TestError("log-rank variance is zero (no comparable risk sets)");

  TestResult result;
  result.statistic = observed_minus_expected * observed_minus_expected / variance;
  result.df = 1;
  result.p_value = chi2_sf(result.statistic, 1);
  result.t0 = times.back();
  result.method = "log-rank";
  return result;
}

TestResult greenwood_survival_test(const CountingSystem& cs1, const CountingSystem& cs2, double t0,
                                   const std::vector<std::size_t>& event_transitions) {
  check_transitions(cs1, event_transitions);
  check_transitions(cs2, event_transitions);

  struct KaplanMeier {
    double survival = 1.0;
    double variance = 0.0;
    bool informative = false;
  };
  const auto estimate = [&](const CountingSystem& cs) {
    KaplanMeier km;
    double greenwood_sum = 0.0;
    for (double t : event_times(cs, event_transitions)) {
      if (t > t0) break;
      const double y = pooled_at_risk(cs, event_transitions, t);
      const double d = events_at(cs, event_transitions, t);
      if (y <= 0.0) throw TestError("events with empty risk set at time " + std::to_string(t));
      km.informative = true;
      km.survival *= 1.0 - d / y;
      if (y > d) greenwood_sum += d / (y * (y - d));
    }
    km.variance = km.survival * km.survival * greenwood_sum;
    return km;
  };
  const KaplanMeier a = estimate(cs1);
  const KaplanMeier b = estimate(cs2);
  if (!a.informative || !b.informative)
    throw TestError("Greenwood test needs events before t0 in both groups");
  const double variance = a.variance + b.variance;
  if (!(variance > 0.0)) throw TestError("Greenwood variance is zero");

  const auto wald = [](double s, double var) {
    GroupEstimate g;
    g.label = "S";
    g.estimate = s;
    g.std_error = std::sqrt(var);
    g.lower = s - kWaldZ * g.std_error;
    g.upper = s + kWaldZ * g.std_error;
    return g;
  };
  TestResult result;
  const double diff = a.survival - b.survival;
  result.statistic = diff * diff / variance;
  result.df = 1;
  result.p_value = chi2_sf(result.statistic, 1);
  result.t0 = t0;
  result.method = "greenwood";
  result.group1 = {wald(a.survival, a.variance)};
  result.group2 = {wald(b.survival, b.variance)};
  return result;
}

}  // namespace survode
