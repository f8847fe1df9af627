#include <doctest.h>

#include <cmath>

#include "turnpike/integer_control.hpp"

using namespace turnpike;

namespace {

// Source-free transport: the steady boundary-to-trace map is the identity, so
// every enumeration value has a short closed form.
SystemSpec transparent_system() {
  return make_constant_system(1.0, -1.0, Eigen::Matrix2d::Zero(), 0.0, 1.0);
}

IntegerSpec base_spec() {
  IntegerSpec spec;
  spec.feasible = {0.0, 1.0, 2.0};
  spec.nu = 1.5;
  spec.lambda = 0.5;
  spec.R_b = Eigen::Vector2d(1.2, 0.0);
  return spec;
}

}  // namespace

TEST_SUITE_BEGIN("integer_control");

TEST_CASE("total variation sums jump magnitudes") {
  CHECK(total_variation({}) == 0.0);
  CHECK(total_variation({4.0}) == 0.0);
  CHECK(total_variation({1.0, 1.0, 0.0, 2.0}) == 3.0);
}

TEST_CASE("spec validation") {
  IntegerSpec spec = base_spec();
  spec.feasible = {};
  CHECK_THROWS_AS(switching_threshold_check(spec), EmptyGrid);
  spec.feasible = {1.0, 2.0};
  CHECK_THROWS_AS(switching_threshold_check(spec), ValidationError);
  spec = base_spec();
  spec.nu = -0.5;
  CHECK_THROWS_AS(switching_threshold_check(spec), PositivityViolation);
  spec = base_spec();
  spec.lambda = 1.0;
  CHECK_THROWS_AS(switching_threshold_check(spec), LambdaOutOfRange);
}

TEST_CASE("switching threshold compares nu against the zero-control cost") {
  const ThresholdReport ok = switching_threshold_check(base_spec());
  CHECK(ok.bound == doctest::Approx(0.72).epsilon(1e-12));
  CHECK(ok.satisfied);

  IntegerSpec weak = base_spec();
  weak.nu = 0.1;
  const ThresholdReport bad = switching_threshold_check(weak);
  CHECK_FALSE(bad.satisfied);
}

TEST_CASE("static enumeration reproduces the closed-form table") {
  const SystemSpec sys = transparent_system();
  const SpaceTimeGrid grid(sys, 20, 20, 1.0);
  const IntegerStaticSolution sol =
      solve_integer_static(base_spec(), sys, grid);

  REQUIRE(sol.table.size() == 3);
  // With unit steady gain and target (1.2, 0) the minus channel is zero and
  // the per-level value is lambda a^2 + (1 - lambda)(a - 1.2)^2.
  CHECK(sol.table[0].alpha == 0.0);
  CHECK(sol.table[0].value == doctest::Approx(0.72).epsilon(1e-12));
  CHECK(sol.table[1].value == doctest::Approx(0.52).epsilon(1e-12));
  CHECK(sol.table[2].value == doctest::Approx(2.32).epsilon(1e-12));
  for (const PerAlpha& row : sol.table)
    CHECK(std::abs(row.u_minus) <= 1e-12);
  CHECK(sol.alpha == 1.0);
  CHECK(sol.value == doctest::Approx(0.52).epsilon(1e-12));
}

TEST_CASE("dynamic enumeration keeps the level constant and bounded") {
  const SystemSpec sys = transparent_system();
  const IntegerSpec spec = base_spec();
  CgOptions opts;
  opts.tol = 1e-12;
  for (double T : {4.0, 10.0}) {
    const int n_x = 20;
    const int n_t = static_cast<int>(std::lround(T * n_x));
    const SpaceTimeGrid grid(sys, n_x, n_t, T, QuadRule::rectangle);
    const IntegerSolution sol = solve_integer_dynamic(spec, sys, grid, opts);
    CHECK(sol.alpha == 1.0);
    CHECK(sol.variation == 0.0);
    CHECK(sol.omega <= (1.0 - spec.lambda) * T * spec.R_b.squaredNorm());
    for (int n = 0; n < n_t; ++n) CHECK(sol.best.control.plus[n] == 1.0);
  }
}

TEST_CASE("dynamic enumeration refuses a sub-threshold switching weight") {
  const SystemSpec sys = transparent_system();
  const SpaceTimeGrid grid(sys, 10, 40, 4.0);
  IntegerSpec weak = base_spec();
  weak.nu = 0.1;
  CHECK_THROWS_AS(solve_integer_dynamic(weak, sys, grid), ThresholdNotMet);
}

TEST_CASE("distance to the static point decays like one over the horizon") {
  const SystemSpec sys = transparent_system();
  IntegerSpec spec = base_spec();
  spec.R_b = Eigen::Vector2d(1.2, 0.8);  // nonzero free channel
  CHECK(switching_threshold_check(spec).satisfied);
  CgOptions opts;
  opts.tol = 1e-12;

  // The minus channel decouples per time index at unit Courant number: it sits
  // at the static value 0.4 and switches off over the final transit, so the
  // averaged squared distance is exactly 0.16 / T.
  std::vector<double> metrics;
  for (double T : {4.0, 10.0}) {
    const int n_x = 20;
    const int n_t = static_cast<int>(std::lround(T * n_x));
    const SpaceTimeGrid grid(sys, n_x, n_t, T, QuadRule::rectangle);
    const IntegerSolution dyn = solve_integer_dynamic(spec, sys, grid, opts);
    const IntegerStaticSolution st = solve_integer_static(spec, sys, grid);
    CHECK(dyn.alpha == st.alpha);
    CHECK(st.u_minus == doctest::Approx(0.4).epsilon(1e-12));
    metrics.push_back(integer_turnpike_metric(dyn, st, grid));
    CHECK(metrics.back() == doctest::Approx(0.16 / T).epsilon(1e-6));
  }
  CHECK(metrics[0] / metrics[1] == doctest::Approx(2.5).epsilon(1e-6));
}

TEST_SUITE_END();
