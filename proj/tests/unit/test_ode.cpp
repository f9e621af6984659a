#include <doctest.h>

#include "../helpers.hpp"
#include "survode/error.hpp"
#include "survode/ode.hpp"
#include "survode/params.hpp"

using namespace survode;
using doctest::Approx;
using helpers::censored;
using helpers::dies;

namespace {

PluginPath survival_path(const EventLog& log, double t0) {
  const auto spec = survival_spec();
  return solve_plugin(spec.definition, estimate_hazards(helpers::system_of(log, {{0, 1}}), spec), t0);
}

}  // namespace

TEST_SUITE("ode") {
  TEST_CASE("survival plugin is the product limit") {
    const auto path = survival_path({dies("a", 1), dies("b", 2), dies("c", 3)}, 3.0);
    REQUIRE(path.grid == std::vector<double>{1, 2, 3});
    CHECK(path.X[0](0) == Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(path.X[1](0) == Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(path.X[2](0) == 0.0);
  }

  TEST_CASE("one-step variance recursion") {
    const auto path = survival_path({dies("a", 1), censored("b", 2)}, 1.0);
    REQUIRE(path.grid.size() == 1);
    CHECK(path.V[0](0, 0) == Approx(0.5).epsilon(1e-15));
    CHECK(path.V[0](0, 0) / static_cast<double>(path.n) == Approx(0.25));
  }

  TEST_CASE("no hazard increments keep X at X0 and V at zero") {
    const auto path = survival_path({censored("a", 1), censored("b", 2)}, 2.0);
    for (std::size_t k = 0; k < path.grid.size(); ++k) {
      CHECK(path.X[k](0) == 1.0);
      CHECK(path.V[k](0, 0) == 0.0);
    }
  }

  TEST_CASE("RMST with no events integrates 1") {
    const auto spec = rmst_spec();
    const auto hz = estimate_hazards(helpers::system_of({censored("a", 3)}, {{0, 1}}), spec);
    const auto path = solve_plugin(spec.definition, hz, 1.5);
    CHECK(path.grid.back() == 1.5);
    CHECK(path.X.back()(1) == Approx(1.5));
    CHECK(path.V.back().cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("solve_variance starts from v0") {
    const auto spec = survival_spec();
    const auto hz = estimate_hazards(helpers::system_of({censored("a", 1)}, {{0, 1}}), spec);
    const Eigen::MatrixXd v0 = Eigen::MatrixXd::Constant(1, 1, 0.3);
    const auto path = solve_variance(spec.definition, hz, 1.0, v0);
    CHECK(path.V.back()(0, 0) == Approx(0.3));
    const auto [x, v] = evaluate_at(path, 0.0);
    CHECK(x(0) == 1.0);
    CHECK(v(0, 0) == Approx(0.3));
  }

  TEST_CASE("evaluate_at is right-continuous") {
    const auto path = survival_path({dies("a", 1), dies("b", 2), dies("c", 3), censored("d", 4)}, 4.0);
    CHECK(evaluate_at(path, 0.0).first(0) == 1.0);
    CHECK(evaluate_at(path, 0.999).first(0) == 1.0);
    CHECK(evaluate_at(path, 1.0).first(0) == Approx(0.75));
    CHECK(evaluate_at(path, 1.5).first(0) == Approx(0.75));
    CHECK(evaluate_at(path, 2.0).first(0) == Approx(0.5));
    CHECK_THROWS_AS(evaluate_at(path, 4.5), SolveError);
    CHECK_THROWS_AS(evaluate_at(path, -1.0), SolveError);
  }

  TEST_CASE("t0 before the first event returns X0") {
    const auto path = survival_path({dies("a", 2), dies("b", 3)}, 1.0);
    CHECK(evaluate_at(path, 1.0).first(0) == 1.0);
  }

  TEST_CASE("covariance stays symmetric") {
    const auto spec = prevalence_spec();
    EventRecord r = dies("a", 1, 1);
    r.transitions.push_back({2, 1, 2});
    EventRecord s = dies("b", 1.5, 1);
    s.censor_time = 3.0;
    const EventLog log = {r, s, dies("c", 2.5, 2), censored("d", 3)};
    const auto hz = estimate_hazards(helpers::system_of(log, spec.transitions()), spec);
    const auto path = solve_plugin(spec.definition, hz, 3.0);
    for (const auto& v : path.V) CHECK((v - v.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("shape mismatches are reported") {
    const auto spec = rmst_spec();
    const auto hz = estimate_hazards(helpers::system_of({dies("a", 1)}, {{0, 1}}), survival_spec());
    CHECK_THROWS_AS(solve_plugin(spec.definition, hz, 1.0), SolveError);
    CHECK_THROWS_AS(solve_plugin(survival_spec().definition, hz, 0.0), SolveError);
  }

  TEST_CASE("non-finite F is reported") {
    auto def = survival_spec().definition;
    def.F = [](const Eigen::VectorXd& x) { return Eigen::MatrixXd::Constant(1, 1, x(0) < 1.0 ? NAN : -x(0)); };
    const auto hz = estimate_hazards(helpers::system_of({dies("a", 1), dies("b", 2), dies("c", 3)}, {{0, 1}}),
                                     survival_spec());
    CHECK_THROWS_AS(solve_plugin(def, hz, 3.0), SolveError);
  }
}
