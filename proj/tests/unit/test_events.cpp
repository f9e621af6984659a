#include <doctest.h>

#include <random>

#include "../helpers.hpp"
#include "../oracles.hpp"
#include "survode/error.hpp"

using namespace survode;
using helpers::censored;
using helpers::dies;

TEST_SUITE("events") {
  TEST_CASE("three deaths without censoring") {
    const EventLog log = {dies("a", 1), dies("b", 2), dies("c", 3)};
    const auto cs = helpers::system_of(log, {{0, 1}});
    CHECK(cs.jump_grid == std::vector<double>{1, 2, 3});
    CHECK(cs.dN.col(0).transpose() == Eigen::RowVector3i(1, 1, 1));
    CHECK(cs.Y.col(0).transpose() == Eigen::RowVector3i(3, 2, 1));
  }

  TEST_CASE("tied deaths share one grid point") {
    const auto cs = helpers::system_of({dies("a", 1), dies("b", 1)}, {{0, 1}});
    REQUIRE(cs.size() == 1);
    CHECK(cs.dN(0, 0) == 2);
    CHECK(cs.Y(0, 0) == 2);
  }

  TEST_CASE("censored subject leaves the risk set") {
    const auto cs = helpers::system_of({dies("a", 1), censored("b", 0.5)}, {{0, 1}});
    REQUIRE(cs.size() == 1);
    CHECK(cs.jump_grid[0] == 1.0);
    CHECK(cs.dN(0, 0) == 1);
    CHECK(cs.Y(0, 0) == 1);
  }

  TEST_CASE("subject censored at an event time is still at risk") {
    const auto cs = helpers::system_of({dies("a", 1), censored("b", 1)}, {{0, 1}});
    CHECK(cs.Y(0, 0) == 2);
  }

  TEST_CASE("simultaneous events of different types share a grid point") {
    const auto cs = helpers::system_of({dies("a", 1, 1), dies("b", 1, 2), censored("c", 2)}, {{0, 1}, {0, 2}});
    REQUIRE(cs.size() == 1);
    CHECK(cs.dN(0, 0) == 1);
    CHECK(cs.dN(0, 1) == 1);
    CHECK(cs.Y(0, 1) == 3);
  }

  TEST_CASE("illness-death risk sets follow the occupied state") {
    EventRecord r = dies("a", 1, 1);
    r.transitions.push_back({2, 1, 2});
    const auto cs = helpers::system_of({r, censored("b", 3)}, {{0, 1}, {0, 2}, {1, 2}});
    CHECK(cs.jump_grid == std::vector<double>{1, 2});
    CHECK(cs.Y(0, 0) == 2);
    CHECK(cs.Y(1, 2) == 1);
    CHECK(cs.Y(1, 0) == 1);
    CHECK(cs.at_risk(1, 1.5) == 1);
    CHECK(cs.at_risk(0, 2.5) == 1);
  }

  TEST_CASE("transition outside the schema names the subject") {
    try {
      helpers::system_of({dies("a", 1), dies("intruder", 2, 2)}, {{0, 1}});
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("intruder") != std::string::npos);
    }
  }

  TEST_CASE("empty record list is an error") {
    CHECK_THROWS_AS(helpers::system_of({}, {{0, 1}}), DataError);
  }

  TEST_CASE("events at time zero are rejected") {
    CHECK_THROWS_AS(dies("a", 0.0).validate(), DataError);
    CHECK_THROWS_AS(helpers::system_of({dies("a", 0.0)}, {{0, 1}}), DataError);
  }

  TEST_CASE("record validation") {
    EventRecord r = dies("a", 2, 1);
    r.transitions.push_back({1, 1, 2});
    CHECK_THROWS_AS(r.validate(), DataError);
    EventRecord c = dies("b", 2);
    c.censor_time = 1.0;
    CHECK_THROWS_AS(c.validate(), DataError);
    EventRecord s = dies("c", 1, 1);
    s.transitions.push_back({2, 0, 2});
    CHECK_THROWS_AS(s.validate(), DataError);
  }

  TEST_CASE("counts add up to the raw transitions") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 20; ++rep) {
      const auto log = oracle::illness_death_data(rng, {.n = 80, .tie_step = rep % 2 ? 0.1 : 0.0});
      const std::vector<Transition> schema = {{0, 1}, {0, 2}, {1, 2}};
      const auto cs = helpers::system_of(log, schema);
      for (std::size_t j = 0; j < schema.size(); ++j) {
        int raw = 0;
        for (const auto& r : log)
          for (const auto& e : r.transitions) raw += e.type() == schema[j];
        CHECK(cs.dN.col(static_cast<Eigen::Index>(j)).sum() == raw);
      }
      for (std::size_t k = 1; k < cs.size(); ++k) CHECK(cs.jump_grid[k - 1] < cs.jump_grid[k]);
    }
  }

  TEST_CASE("construction does not depend on record order") {
    std::mt19937_64 rng(5);
    auto log = oracle::competing_data(rng, {.n = 60, .tie_step = 0.1});
    const auto a = helpers::system_of(log, {{0, 1}, {0, 2}});
    std::shuffle(log.begin(), log.end(), rng);
    const auto b = helpers::system_of(log, {{0, 1}, {0, 2}});
    CHECK(a.jump_grid == b.jump_grid);
    CHECK(a.dN == b.dN);
    CHECK(a.Y == b.Y);
  }

  TEST_CASE("group helpers") {
    const EventLog log = {helpers::in_group(dies("a", 1), "x"), helpers::in_group(dies("b", 1), "y"),
                          helpers::in_group(censored("c", 1), "x")};
    CHECK(group_labels(log) == std::vector<std::string>{"x", "y"});
    CHECK(filter_group(log, "x").size() == 2);
  }
}
