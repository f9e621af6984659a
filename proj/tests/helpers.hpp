#pragma once

#include <string>
#include <vector>

#include "survode/events.hpp"

namespace helpers {

inline survode::EventRecord dies(const std::string& id, double t, survode::State to = 1) {
  survode::EventRecord r;
  r.subject_id = id;
  r.group = "A";
  r.transitions.push_back({t, 0, to});
  return r;
}

inline survode::EventRecord censored(const std::string& id, double t) {
  survode::EventRecord r;
  r.subject_id = id;
  r.group = "A";
  r.censor_time = t;
  return r;
}

inline survode::EventRecord in_group(survode::EventRecord r, const std::string& g) {
  r.group = g;
  return r;
}

inline survode::CountingSystem system_of(const survode::EventLog& log, std::vector<survode::Transition> schema) {
  return survode::build_counting_system(log, schema);
}

}  // namespace helpers
