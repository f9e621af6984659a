#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "survode/error.hpp"
#include "survode/params.hpp"
#include "survode/simulation.hpp"

using namespace survode;
using doctest::Approx;

namespace {

HazardScenario exponential(double rate, double horizon) {
  auto s = default_scenario("survival", HazardShape::kConstant);
  s.group1.primary.level = s.group2.primary.level = rate;
  s.horizon = horizon;
  return s;
}

std::size_t changed(const EventLog& a, const EventLog& b) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < a.size(); ++i) c += !(a[i] == b[i]);
  return c;
}

}  // namespace

TEST_SUITE("simulation") {
  TEST_CASE("seed derivation separates streams") {
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 1) != derive_seed(2, 1));
    CHECK(derive_seed(7, 3) == derive_seed(7, 3));
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
      const double u = rng.uniform();
      CHECK((u > 0.0 && u < 1.0));
      CHECK(rng.below(7) < 7u);
    }
  }

  TEST_CASE("linear hazards invert their cumulative") {
    for (auto shape : {HazardShape::kConstant, HazardShape::kCrossing, HazardShape::kDeviating}) {
      const LinearHazard h{shape, 0.4, shape == HazardShape::kCrossing ? -0.2 : 0.5, 0.75};
      for (double t : {0.1, 0.5, 0.75, 1.0, 1.4}) {
        const auto back = h.inverse_cumulative(h.cumulative(t), 1.5);
        REQUIRE(back.has_value());
        CHECK(*back == Approx(t).epsilon(1e-12));
      }
      CHECK_FALSE(h.inverse_cumulative(h.cumulative(1.5) + 0.01, 1.5).has_value());
    }
  }

  TEST_CASE("exponential event times have mean 1") {
    constexpr std::size_t n = 100000;
    const auto log = sample_event_times(exponential(1.0, 60.0), 1, n, 99);
    double sum = 0.0;
    for (const auto& r : log) {
      REQUIRE(r.transitions.size() == 1);
      sum += r.transitions[0].time;
    }
    CHECK(std::abs(sum / n - 1.0) < 3.0 / std::sqrt(static_cast<double>(n)));
  }

  TEST_CASE("zero hazard censors everyone at the horizon") {
    const auto log = sample_event_times(exponential(0.0, 1.5), 2, 50, 1);
    for (const auto& r : log) {
      CHECK(r.transitions.empty());
      CHECK(r.censor_time == 1.5);
      CHECK(r.group == "2");
    }
  }

  TEST_CASE("censoring fraction is exact") {
    const auto log = sample_event_times(exponential(0.5, 1.5), 1, 1000, 3);
    CHECK(apply_censoring(log, 0.0, 5) == log);
    const auto cens = apply_censoring(log, 0.10, 5);
    CHECK(changed(log, cens) == 100);
    for (std::size_t i = 0; i < log.size(); ++i) {
      if (cens[i] == log[i]) continue;
      CHECK(cens[i].transitions.empty());
      CHECK(*cens[i].censor_time < log[i].end_of_followup());
    }
    const auto ind = apply_independent_censoring(log, 0.10, 1.5, 5);
    CHECK(changed(log, ind) <= 100);
    for (const auto& r : ind) CHECK_NOTHROW(r.validate());
    CHECK_THROWS_AS(apply_censoring(log, 1.0, 5), SimulationError);
  }

  TEST_CASE("all state models sample valid histories") {
    for (const auto& name : parameter_names()) {
      for (auto shape : {HazardShape::kConstant, HazardShape::kCrossing, HazardShape::kDeviating}) {
        const auto s = default_scenario(name, shape);
        const auto log = sample_event_times(s, 1, 300, 4);
        const auto tr = s.transitions();
        for (const auto& r : log) {
          CHECK_NOTHROW(r.validate());
          CHECK(r.end_of_followup() <= s.horizon);
          for (const auto& e : r.transitions) CHECK(std::find(tr.begin(), tr.end(), e.type()) != tr.end());
        }
      }
    }
  }

  TEST_CASE("crossing lines give equal cumulative hazards at twice the changepoint") {
    auto s = default_scenario("survival", HazardShape::kCrossing);
    s.horizon = 3.0;
    s.group1.primary.changepoint = s.group2.primary.changepoint = 1.0;
    s.group1.primary.level = s.group2.primary.level = 0.5;
    s.group1.primary.slope = 0.2;
    s.group2.primary.slope = -0.2;
    CHECK(s.cumulative(1, {0, 1}, 2.0) == Approx(s.cumulative(2, {0, 1}, 2.0)).epsilon(1e-14));
    CHECK(s.cumulative(1, {0, 1}, 1.0) != Approx(s.cumulative(2, {0, 1}, 1.0)));
    constexpr std::size_t n = 20000;
    const auto by2 = [](const EventLog& log) {
      return static_cast<double>(std::count_if(log.begin(), log.end(), [](const EventRecord& r) {
               return !r.transitions.empty() && r.transitions[0].time <= 2.0;
             })) / n;
    };
    const double f1 = by2(sample_event_times(s, 1, n, 11));
    const double f2 = by2(sample_event_times(s, 2, n, 12));
    CHECK(std::abs(f1 - f2) < 4.0 * std::sqrt(2.0 * f1 * (1.0 - f1) / n));
  }

  TEST_CASE("calibration matches the closed form for constant survival") {
    const auto s = calibrate_kappa(default_scenario("survival", HazardShape::kConstant), survival_spec(), 1.5, -0.05);
    const double r = -std::log(std::exp(-0.45) + 0.05) / 1.5;
    CHECK(s.group2.primary.level == Approx(r).epsilon(1e-4));
    const auto x1 = true_parameter(s, 1, survival_spec(), 1.5);
    const auto x2 = true_parameter(s, 2, survival_spec(), 1.5);
    CHECK(std::abs(x1(0) - x2(0) + 0.05) < 1e-7);
  }

  TEST_CASE("kappa 0 leaves group 2 equal to group 1") {
    for (const auto& name : parameter_names()) {
      for (auto shape : {HazardShape::kConstant, HazardShape::kCrossing, HazardShape::kDeviating}) {
        const auto base = default_scenario(name, shape);
        const auto s = calibrate_kappa(base, parameter_spec(name), 1.5, 0.0);
        CHECK(s.group2.primary.level == Approx(base.group1.primary.level).epsilon(1e-6));
        CHECK(s.group2.primary.slope == Approx(base.group1.primary.slope).epsilon(1e-6));
      }
    }
  }

  TEST_CASE("competing hazard stays at 0.4 while calibrating") {
    const auto s = calibrate_kappa(default_scenario("cuminc", HazardShape::kConstant), cuminc_spec(), 1.5, -0.05);
    CHECK(s.group1.secondary == 0.4);
    CHECK(s.group2.secondary == 0.4);
    CHECK(s.group2.primary.level > s.group1.primary.level);
  }

  TEST_CASE("unreachable kappa reports the achievable range") {
    try {
      calibrate_kappa(default_scenario("survival", HazardShape::kCrossing), survival_spec(), 1.5, -0.9);
      FAIL("expected SimulationError");
    } catch (const SimulationError& e) {
      CHECK(std::string(e.what()).find("achievable") != std::string::npos);
    }
  }

  TEST_CASE("power studies are reproducible and thread-independent") {
    const auto s = default_scenario("survival", HazardShape::kConstant);
    PowerSettings ps;
    ps.n_per_group = 60;
    ps.replications = 40;
    ps.seed = 17;
    ps.threads = 1;
    const std::vector tests = {TestKind::kPlugin, TestKind::kLogRank, TestKind::kGreenwood};
    const auto a = run_power_study(s, survival_spec(), tests, ps);
    ps.threads = 4;
    const auto b = run_power_study(s, survival_spec(), tests, ps);
    REQUIRE(a.outcomes.size() == 40);
    for (std::size_t r = 0; r < 40; ++r)
      for (std::size_t i = 0; i < tests.size(); ++i) CHECK(a.outcomes[r][i].p_value == b.outcomes[r][i].p_value);
    for (std::size_t i = 0; i < tests.size(); ++i) CHECK(a.points[i].rate == b.points[i].rate);
    ps.seed = 18;
    const auto c = run_power_study(s, survival_spec(), tests, ps);
    CHECK(c.outcomes[0][0].p_value != a.outcomes[0][0].p_value);
  }

  TEST_CASE("failed replications are counted and flagged") {
    // With 2 subjects per group most replications have no usable variance.
    const auto s = default_scenario("survival", HazardShape::kConstant);
    PowerSettings ps;
    ps.n_per_group = 2;
    ps.replications = 50;
    const auto p = estimate_power(s, survival_spec(), TestKind::kPlugin, ps);
    CHECK(p.failures > 0);
    CHECK(p.flagged);
    CHECK(p.replications == 50);
  }
}
