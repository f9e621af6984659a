#include <doctest.h>

#include <cmath>
#include <random>

#include "../helpers.hpp"
#include "../oracles.hpp"
#include "survode/error.hpp"
#include "survode/params.hpp"
#include "survode/simulation.hpp"

using namespace survode;
using doctest::Approx;
using helpers::censored;
using helpers::dies;

namespace {

PluginPath solve(const ParameterSpec& spec, const EventLog& log, double t0) {
  const auto hz = estimate_hazards(helpers::system_of(log, spec.transitions()), spec);
  return solve_plugin(spec.definition, hz, t0);
}

EventRecord recurrences(const std::string& id, std::vector<double> times, double censor) {
  EventRecord r = censored(id, censor);
  for (double t : times) r.transitions.push_back({t, 0, 0});
  return r;
}

}  // namespace

TEST_SUITE("params") {
  TEST_CASE("lookup by name") {
    for (const auto& name : parameter_names()) CHECK(parameter_spec(name).name == name);
    CHECK(parameter_names().size() == 5);
    CHECK_THROWS(parameter_spec("hazard_ratio"));
  }

  TEST_CASE("survival reaches zero after the last death") {
    const auto path = solve(survival_spec(), {dies("a", 1), dies("b", 2), dies("c", 3)}, 3.0);
    CHECK(path.X.back()(0) == 0.0);
  }

  TEST_CASE("RMST rectangle sums") {
    CHECK(solve(rmst_spec(), {censored("a", 5)}, 2.0).X.back()(1) == Approx(2.0));
    const auto path = solve(rmst_spec(), {dies("a", 1), censored("b", 3)}, 2.0);
    CHECK(path.X.back()(1) == Approx(1.5));
    CHECK(path.V.back().cwiseAbs().maxCoeff() > 0.0);
  }

  TEST_CASE("cumulative incidence of a single subject") {
    const auto path = solve(cuminc_spec(), {dies("a", 1, 1)}, 1.0);
    CHECK(path.X.back()(1) == 1.0);
    CHECK(path.X.back()(0) == 0.0);
  }

  TEST_CASE("incidences and survival add up to one") {
    std::mt19937_64 rng(21);
    for (int rep = 0; rep < 10; ++rep) {
      const auto log = oracle::competing_data(rng, {.n = 80, .tie_step = rep % 2 ? 0.1 : 0.0});
      const auto c1 = solve(cuminc_spec(1, {2}), log, 3.0);
      const auto c2 = solve(cuminc_spec(2, {1}), log, 3.0);
      REQUIRE(c1.grid == c2.grid);
      for (std::size_t k = 0; k < c1.grid.size(); ++k) {
        CHECK(c1.X[k](0) == Approx(c2.X[k](0)).epsilon(1e-14));
        CHECK(c1.X[k](0) + c1.X[k](1) + c2.X[k](1) == Approx(1.0).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("mean frequency without deaths is the recurrent Nelson-Aalen") {
    const EventLog log = {recurrences("a", {0.5, 1.5}, 3), recurrences("b", {1.0}, 2), recurrences("c", {}, 1.2)};
    const auto path = solve(mean_frequency_spec(), log, 2.0);
    CHECK(path.X.back()(0) == 1.0);
    CHECK(path.X.back()(1) == Approx(1.0 / 3 + 1.0 / 3 + 1.0 / 2));
  }

  TEST_CASE("mean frequency without recurrences is zero") {
    const auto path = solve(mean_frequency_spec(), {dies("a", 1), censored("b", 2)}, 2.0);
    for (const auto& x : path.X) CHECK(x(1) == 0.0);
  }

  TEST_CASE("prevalence without transitions") {
    const auto path = solve(prevalence_spec(), {censored("a", 1), censored("b", 2)}, 2.0);
    CHECK(path.X.back()(0) == 1.0);
    CHECK(path.X.back()(1) == 0.0);
  }

  TEST_CASE("competing-risks toy set: generic variance equals the per-parameter system") {
    const EventLog log = {dies("a", 0.5, 1), dies("b", 0.9, 2), censored("c", 1.1), dies("d", 1.4, 1),
                          dies("e", 2.0, 2)};
    const auto path = solve(cuminc_spec(), log, 2.0);
    const auto ref = oracle::cuminc_variance(log);
    REQUIRE(ref.size() == 4);
    for (const auto& r : ref) {
      const auto [x, v] = evaluate_at(path, r.time);
      CHECK(std::abs(x(1) - r.estimate) < 1e-12);
      CHECK(std::abs(v(1, 1) - r.variance) < 1e-12);
    }
  }

  TEST_CASE("Jacobians match finite differences") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto& name : parameter_names()) {
      const auto def = parameter_spec(name).definition;
      for (int rep = 0; rep < 20; ++rep) {
        Eigen::VectorXd x(static_cast<Eigen::Index>(def.p));
        for (auto& v : x) v = u(rng);
        for (std::size_t j = 0; j < def.q; ++j) {
          const Eigen::MatrixXd J = def.jacobians[j](x);
          for (Eigen::Index c = 0; c < x.size(); ++c) {
            Eigen::VectorXd hi = x, lo = x;
            hi(c) += 1e-6;
            lo(c) -= 1e-6;
            const Eigen::VectorXd fd = (def.F(hi).col(static_cast<Eigen::Index>(j)) -
                                        def.F(lo).col(static_cast<Eigen::Index>(j))) / 2e-6;
            CHECK((fd - J.col(c)).cwiseAbs().maxCoeff() < 1e-6);
          }
        }
      }
    }
  }

  TEST_CASE("mean frequency variance matches the Monte Carlo spread") {
    const auto scenario = default_scenario("mean_frequency", HazardShape::kConstant);
    const auto spec = mean_frequency_spec();
    constexpr std::size_t n = 200, reps = 1000;
    double sum = 0.0, sum2 = 0.0, vsum = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      const auto log = sample_event_times(scenario, 1, n, 1000 + r);
      const auto path = solve(spec, log, 1.5);
      const double k = path.X.back()(1);
      sum += k;
      sum2 += k * k;
      vsum += path.V.back()(1, 1);
    }
    const double mean = sum / reps;
    const double empirical = n * (sum2 - reps * mean * mean) / (reps - 1);
    const double model = vsum / reps;
    MESSAGE("empirical " << empirical << ", plugin " << model);
    CHECK(std::abs(empirical / model - 1.0) < 0.15);
  }
}
