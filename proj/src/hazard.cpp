#include <algorithm>
#include <set>

#include "survode/error.hpp"
#include "survode/hazard.hpp"

namespace survode {

namespace {

struct ResolvedTerm {
  std::vector<std::size_t> transitions;
  // One schema column per distinct origin state; their Y columns sum to the pooled risk set.
  std::vector<std::size_t> risk_columns;
};

ResolvedTerm resolve(const CountingSystem& cs, const HazardTerm& term) {
  if (term.transitions.empty()) throw EstimationError("hazard term without transitions");
  ResolvedTerm r;
  std::set<State> origins;
  for (const auto& t : term.transitions) {
    const auto idx = cs.index_of(t);
    if (std::find(r.transitions.begin(), r.transitions.end(), idx) != r.transitions.end())
      throw EstimationError("transition " + to_string(t) + " repeated within a term");
    r.transitions.push_back(idx);
    if (origins.insert(t.from).second) r.risk_columns.push_back(idx);
  }
  return r;
}

}  // namespace

Eigen::VectorXd HazardPath::cumulative(double t) const {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(q()));
  for (std::size_t k = 0; k < jump_grid.size() && jump_grid[k] <= t; ++k)
    a += dA.row(static_cast<Eigen::Index>(k)).transpose();
  for (std::size_t i = 0; i < q(); ++i)
    if (lebesgue_mask[i]) a(static_cast<Eigen::Index>(i)) = t;
  return a;
}

HazardPath nelson_aalen(const CountingSystem& cs,
                        const std::vector<std::vector<std::size_t>>& component_map,
                        Covariation covariation) {
  std::vector<HazardComponent> components;
  for (const auto& indices : component_map) {
    HazardTerm term;
    std::string label;
    for (auto idx : indices) {
      if (idx >= cs.schema.size())
        throw EstimationError("component refers to schema index " + std::to_string(idx) +
                              " but schema has " + std::to_string(cs.schema.size()) + " entries");
      term.transitions.push_back(cs.schema[idx]);
      label += (label.empty() ? "" : "+") + to_string(cs.schema[idx]);
    }
    components.push_back({label, {term}, false});
  }
  return nelson_aalen(cs, components, covariation);
}

HazardPath nelson_aalen(const CountingSystem& cs, std::span<const HazardComponent> components,
                        Covariation covariation) {
  const std::size_t q = components.size();
  if (q == 0) throw EstimationError("no hazard components requested");

  std::vector<std::vector<ResolvedTerm>> terms(q);
  std::vector<bool> used(cs.schema.size(), false);
  for (std::size_t i = 0; i < q; ++i) {
    if (components[i].lebesgue) {
      if (!components[i].terms.empty())
        throw EstimationError("component '" + components[i].label + "' is Lebesgue but has terms");
      continue;
    }
    if (components[i].terms.empty())
      throw EstimationError("component '" + components[i].label + "' has no terms");
    for (const auto& t : components[i].terms) {
      terms[i].push_back(resolve(cs, t));
      for (auto idx : terms[i].back().transitions) used[idx] = true;
    }
  }

  std::vector<Eigen::Index> rows;
  for (Eigen::Index k = 0; k < cs.dN.rows(); ++k)
    for (std::size_t j = 0; j < used.size(); ++j)
      if (used[j] && cs.dN(k, static_cast<Eigen::Index>(j)) > 0) {
        rows.push_back(k);
        break;
      }

  HazardPath path;
  path.n = cs.n;
  path.lebesgue_mask.resize(q);
  path.may_decrease.assign(q, false);
  for (std::size_t i = 0; i < q; ++i) {
    path.lebesgue_mask[i] = components[i].lebesgue;
    path.labels.push_back(components[i].label);
  }
  const auto K = static_cast<Eigen::Index>(rows.size());
  const auto Q = static_cast<Eigen::Index>(q);
  path.dA = Eigen::MatrixXd::Zero(K, Q);
  path.events = Eigen::MatrixXi::Zero(K, Q);
  path.dB.reserve(rows.size());

  // Flattened (component, term) list for the optional covariation.
  struct TermJump {
    std::size_t component;
    const ResolvedTerm* term;
    double at_risk;
  };

  for (Eigen::Index r = 0; r < K; ++r) {
    const Eigen::Index k = rows[static_cast<std::size_t>(r)];
    const double t = cs.jump_grid[static_cast<std::size_t>(k)];
    path.jump_grid.push_back(t);
    std::vector<TermJump> jumps;
    for (std::size_t i = 0; i < q; ++i)
      for (const auto& term : terms[i]) {
        int dn = 0;
        for (auto idx : term.transitions) dn += cs.dN(k, static_cast<Eigen::Index>(idx));
        int y = 0;
        for (auto idx : term.risk_columns) y += cs.Y(k, static_cast<Eigen::Index>(idx));
        if (dn > 0 && y == 0)
          throw EstimationError("events with empty risk set at time " + std::to_string(t) +
                                " in component '" + components[i].label + "'");
        if (dn > 0) {
          path.dA(r, static_cast<Eigen::Index>(i)) += static_cast<double>(dn) / y;
          path.events(r, static_cast<Eigen::Index>(i)) += dn;
        }
        if (y > 0) jumps.push_back({i, &term, static_cast<double>(y)});
      }

    Eigen::MatrixXd dB = Eigen::MatrixXd::Zero(Q, Q);
    if (covariation == Covariation::kJumpProducts) {
      const Eigen::VectorXd c = path.dA.row(r).transpose();
      dB = c * c.transpose();
    } else {
      for (const auto& u : jumps)
        for (const auto& v : jumps) {
          int shared = 0;
          for (auto idx : u.term->transitions)
            if (std::find(v.term->transitions.begin(), v.term->transitions.end(), idx) !=
                v.term->transitions.end())
              shared += cs.dN(k, static_cast<Eigen::Index>(idx));
          if (shared > 0)
            dB(static_cast<Eigen::Index>(u.component), static_cast<Eigen::Index>(v.component)) +=
                shared / (u.at_risk * v.at_risk);
        }
    }
    path.dB.push_back(std::move(dB));
  }
  return path;
}

HazardPath attach_lebesgue(const HazardPath& path, const std::vector<std::size_t>& positions) {
  const std::size_t q_new = path.q() + positions.size();
  std::vector<bool> is_new(q_new, false);
  for (auto p : positions) {
    if (p >= q_new)
      throw EstimationError("Lebesgue position " + std::to_string(p) + " outside 0.." +
                            std::to_string(q_new - 1));
    if (is_new[p]) throw EstimationError("Lebesgue position " + std::to_string(p) + " repeated");
    is_new[p] = true;
  }
  // old index for each new slot
  std::vector<std::ptrdiff_t> source(q_new, -1);
  std::size_t next = 0;
  for (std::size_t i = 0; i < q_new; ++i)
    if (!is_new[i]) source[i] = static_cast<std::ptrdiff_t>(next++);

  HazardPath out;
  out.jump_grid = path.jump_grid;
  out.n = path.n;
  out.skipped_increments = path.skipped_increments;
  out.extrapolated = path.extrapolated;
  const auto K = static_cast<Eigen::Index>(path.size());
  const auto Q = static_cast<Eigen::Index>(q_new);
  out.dA = Eigen::MatrixXd::Zero(K, Q);
  out.events = Eigen::MatrixXi::Zero(K, Q);
  out.dB.assign(path.size(), Eigen::MatrixXd::Zero(Q, Q));
  for (std::size_t i = 0; i < q_new; ++i) {
    if (source[i] < 0) {
      out.lebesgue_mask.push_back(true);
      out.may_decrease.push_back(false);
      out.labels.push_back("time");
      continue;
    }
    const auto s = static_cast<std::size_t>(source[i]);
    out.lebesgue_mask.push_back(path.lebesgue_mask[s]);
    out.may_decrease.push_back(path.may_decrease.empty() ? false : path.may_decrease[s]);
    out.labels.push_back(s < path.labels.size() ? path.labels[s] : std::string{});
    out.dA.col(static_cast<Eigen::Index>(i)) = path.dA.col(source[i]);
    if (path.events.size() > 0) out.events.col(static_cast<Eigen::Index>(i)) = path.events.col(source[i]);
  }
  for (std::size_t k = 0; k < path.size(); ++k)
    for (std::size_t a = 0; a < q_new; ++a)
      for (std::size_t b = 0; b < q_new; ++b)
        if (source[a] >= 0 && source[b] >= 0)
          out.dB[k](static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
              path.dB[k](source[a], source[b]);
  return out;
}

}  // namespace survode
