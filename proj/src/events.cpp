#include "survode/events.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "survode/error.hpp"

namespace survode {

std::string to_string(const Transition& t) {
  return std::to_string(t.from) + "->" + std::to_string(t.to);
}

double EventRecord::end_of_followup() const {
  if (censor_time) return *censor_time;
  return transitions.empty() ? 0.0 : transitions.back().time;
}

State EventRecord::final_state() const {
  return transitions.empty() ? State{0} : transitions.back().to;
}

void EventRecord::validate() const {
  const std::string who = "subject '" + subject_id + "'";
  State current = 0;
  double last = 0.0;
  for (const auto& tr : transitions) {
    if (!std::isfinite(tr.time)) throw DataError(who + ": non-finite transition time");
    if (tr.time <= 0.0) throw DataError(who + ": transition at time <= 0");
    if (tr.time <= last && last > 0.0)
      throw DataError(who + ": transition times not strictly increasing");
    if (tr.from != current)
      throw DataError(who + ": transition " + to_string(tr.type()) + " does not start in state " +
                      std::to_string(current));
    current = tr.to;
    last = tr.time;
  }
  if (censor_time) {
    if (!std::isfinite(*censor_time) || *censor_time < 0.0)
      throw DataError(who + ": invalid censoring time");
    if (*censor_time < last) throw DataError(who + ": censored before its last transition");
  }
  if (transitions.empty() && !censor_time) throw DataError(who + ": no follow-up recorded");
}

EventLog filter_group(const EventLog& log, const std::string& group) {
  EventLog out;
  std::copy_if(log.begin(), log.end(), std::back_inserter(out),
               [&](const EventRecord& r) { return r.group == group; });
  return out;
}

std::vector<std::string> group_labels(const EventLog& log) {
  std::vector<std::string> labels;
  for (const auto& r : log)
    if (std::find(labels.begin(), labels.end(), r.group) == labels.end()) labels.push_back(r.group);
  return labels;
}

std::optional<State> SubjectHistory::state_before(double t) const {
  for (const auto& s : spells)
    if (s.entry < t && t <= s.exit) return s.state;
  return std::nullopt;
}

std::size_t CountingSystem::index_of(const Transition& t) const {
  auto it = std::find(schema.begin(), schema.end(), t);
  if (it == schema.end()) throw DataError("transition " + to_string(t) + " not in schema");
  return static_cast<std::size_t>(it - schema.begin());
}

int CountingSystem::at_risk(State state, double time) const {
  auto it = std::find(occupancy_states.begin(), occupancy_states.end(), state);
  if (it == occupancy_states.end()) return 0;
  const auto k = static_cast<std::size_t>(it - occupancy_states.begin());
  const auto& in = spell_entries[k];
  const auto& out = spell_exits[k];
  // entry < time <= exit
  const auto entered = std::lower_bound(in.begin(), in.end(), time) - in.begin();
  const auto left = std::lower_bound(out.begin(), out.end(), time) - out.begin();
  return static_cast<int>(entered - left);
}

Eigen::MatrixXd CountingSystem::covariate_matrix() const {
  const std::size_t c = subjects.empty() ? 0 : subjects.front().covariates.size();
  Eigen::MatrixXd z(static_cast<Eigen::Index>(subjects.size()), static_cast<Eigen::Index>(c));
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    if (subjects[i].covariates.size() != c)
      throw DataError("subject '" + subjects[i].subject_id + "' has " +
                      std::to_string(subjects[i].covariates.size()) + " covariates, expected " +
                      std::to_string(c));
    for (std::size_t j = 0; j < c; ++j)
      z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = subjects[i].covariates[j];
  }
  return z;
}

CountingSystem build_counting_system(std::span<const EventRecord> records,
                                     std::span<const Transition> schema) {
  if (records.empty()) throw DataError("empty record list");
  if (schema.empty()) throw DataError("empty transition schema");
  for (std::size_t a = 0; a < schema.size(); ++a)
    for (std::size_t b = a + 1; b < schema.size(); ++b)
      if (schema[a] == schema[b]) throw DataError("duplicate schema entry " + to_string(schema[a]));

  CountingSystem cs;
  cs.schema.assign(schema.begin(), schema.end());
  cs.n = records.size();

  std::set<std::string> seen;
  std::vector<double> times;
  cs.subjects.reserve(records.size());
  for (const auto& rec : records) {
    rec.validate();
    if (!seen.insert(rec.subject_id).second)
      throw DataError("duplicate subject id '" + rec.subject_id + "'");

    SubjectHistory h;
    h.subject_id = rec.subject_id;
    h.covariates = rec.covariates;
    State state = 0;
    double entry = 0.0;
    for (const auto& tr : rec.transitions) {
      auto it = std::find(cs.schema.begin(), cs.schema.end(), tr.type());
      if (it == cs.schema.end())
        throw DataError("subject '" + rec.subject_id + "': transition " + to_string(tr.type()) +
                        " not in schema");
      h.jumps.emplace_back(tr.time, static_cast<std::size_t>(it - cs.schema.begin()));
      times.push_back(tr.time);
      if (tr.to != tr.from) {
        h.spells.push_back({state, entry, tr.time});
        state = tr.to;
        entry = tr.time;
      }
    }
    const double end = rec.end_of_followup();
    if (end > entry) h.spells.push_back({state, entry, end});
    cs.subjects.push_back(std::move(h));
  }
  std::sort(cs.subjects.begin(), cs.subjects.end(),
            [](const SubjectHistory& a, const SubjectHistory& b) { return a.subject_id < b.subject_id; });

  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  cs.jump_grid = std::move(times);

  const auto K = static_cast<Eigen::Index>(cs.jump_grid.size());
  const auto L = static_cast<Eigen::Index>(cs.schema.size());
  cs.dN = Eigen::MatrixXi::Zero(K, L);
  for (const auto& h : cs.subjects)
    for (const auto& [t, idx] : h.jumps) {
      const auto k = std::lower_bound(cs.jump_grid.begin(), cs.jump_grid.end(), t) - cs.jump_grid.begin();
      cs.dN(k, static_cast<Eigen::Index>(idx)) += 1;
    }

  std::map<State, std::pair<std::vector<double>, std::vector<double>>> occupancy;
  for (const auto& h : cs.subjects)
    for (const auto& s : h.spells) {
      auto& [in, out] = occupancy[s.state];
      in.push_back(s.entry);
      out.push_back(s.exit);
    }
  for (auto& [state, bounds] : occupancy) {
    std::sort(bounds.first.begin(), bounds.first.end());
    std::sort(bounds.second.begin(), bounds.second.end());
    cs.occupancy_states.push_back(state);
    cs.spell_entries.push_back(std::move(bounds.first));
    cs.spell_exits.push_back(std::move(bounds.second));
  }

  cs.Y = Eigen::MatrixXi::Zero(K, L);
  for (Eigen::Index j = 0; j < L; ++j)
    for (Eigen::Index k = 0; k < K; ++k)
      cs.Y(k, j) = cs.at_risk(cs.schema[static_cast<std::size_t>(j)].from,
                              cs.jump_grid[static_cast<std::size_t>(k)]);
  return cs;
}

}  // namespace survode
