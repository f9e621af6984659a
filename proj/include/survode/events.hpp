#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace survode {

using State = int;

/// A transition type k -> j. Self-transitions (k -> k) model recurrent events.
struct Transition {
  State from = 0;
  State to = 0;

  friend bool operator==(const Transition&, const Transition&) = default;
};

std::string to_string(const Transition& t);

struct TransitionEvent {
  double time = 0.0;
  State from = 0;
  State to = 0;

  Transition type() const { return {from, to}; }
  friend bool operator==(const TransitionEvent&, const TransitionEvent&) = default;
};

/// Observed history of one subject. Every subject starts in state 0 at time 0.
struct EventRecord {
  std::string subject_id;
  std::string group;
  std::vector<TransitionEvent> transitions;
  std::optional<double> censor_time;
  std::vector<double> covariates;

  /// Time up to which the subject is under observation: the censoring time if
  /// present, otherwise the last transition time.
  double end_of_followup() const;

  /// State occupied after the last recorded transition.
  State final_state() const;

  /// Throws DataError when times are not strictly increasing, the states do
  /// not form a path starting in 0, or the censoring precedes a transition.
  void validate() const;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

using EventLog = std::vector<EventRecord>;

/// Records whose group label equals `group`, in input order.
EventLog filter_group(const EventLog& log, const std::string& group);

/// Distinct group labels in order of first appearance.
std::vector<std::string> group_labels(const EventLog& log);

/// One sojourn of a subject in a state, occupying (entry, exit].
struct Spell {
  State state = 0;
  double entry = 0.0;
  double exit = 0.0;
};

/// Subject-level view retained for regression-type hazard estimators.
struct SubjectHistory {
  std::string subject_id;
  std::vector<Spell> spells;
  /// (time, schema index) of every counted transition.
  std::vector<std::pair<double, std::size_t>> jumps;
  std::vector<double> covariates;

  /// State occupied just before t, or nullopt when not under observation.
  std::optional<State> state_before(double t) const;
};

/// Multivariate counting process N and at-risk process Y on the event grid.
///
/// Rows of dN and Y correspond to grid times, columns to schema entries. Y is
/// evaluated just before each grid time.
struct CountingSystem {
  std::vector<Transition> schema;
  std::vector<double> jump_grid;
  Eigen::MatrixXi dN;
  Eigen::MatrixXi Y;
  std::size_t n = 0;
  /// Sorted by subject id so construction is independent of input order.
  std::vector<SubjectHistory> subjects;
  /// Sorted spell boundaries per occupied state, for at-risk queries off the grid.
  std::vector<State> occupancy_states;
  std::vector<std::vector<double>> spell_entries;
  std::vector<std::vector<double>> spell_exits;

  std::size_t size() const { return jump_grid.size(); }
  std::size_t transition_count() const { return schema.size(); }

  /// Index of `t` in the schema, or throws DataError.
  std::size_t index_of(const Transition& t) const;

  /// Number of subjects occupying `state` just before `time`.
  int at_risk(State state, double time) const;

  /// n x c matrix of subject covariates in `subjects` order.
  Eigen::MatrixXd covariate_matrix() const;
};

CountingSystem build_counting_system(std::span<const EventRecord> records,
                                     std::span<const Transition> schema);

}  // namespace survode
