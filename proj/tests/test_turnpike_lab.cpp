#include <doctest.h>

#include <cmath>
#include <vector>

#include "turnpike/turnpike_metrics.hpp"

using namespace turnpike;

namespace {

SystemSpec shift_system(double length) {
  return make_constant_system(1.0, -1.0, Eigen::Matrix2d::Zero(), 0.0, length);
}

SystemSpec example_system() {
  return make_constant_system(1.0, -1.0, Eigen::Matrix2d::Identity(), -1.0,
                              1.0);
}

// Sine-squared bump supported on [0.1, 0.4] in the rightward channel.
StaticProfile bump_profile(const SpaceTimeGrid& grid) {
  StaticProfile h0(grid.n_x());
  for (int i = 0; i <= grid.n_x(); ++i) {
    const double x = grid.x(i);
    if (x > 0.1 && x < 0.4) {
      const double s = std::sin(3.14159265358979323846 * (x - 0.1) / 0.3);
      h0.plus[i] = s * s;
    }
  }
  return h0;
}

}  // namespace

TEST_SUITE_BEGIN("turnpike_lab");

TEST_CASE("control metric hand value") {
  const SystemSpec sys = shift_system(1.0);
  BoundaryControl u(2);
  u.plus = {1.0, 2.0};
  u.minus = {0.0, 1.0};
  const Eigen::Vector2d u_static(1.0, 0.0);
  {
    const SpaceTimeGrid grid(sys, 2, 2, 1.0, QuadRule::rectangle);
    CHECK(control_metric(grid, u, u_static) ==
          doctest::Approx(1.0).epsilon(1e-14));
  }
  {
    const SpaceTimeGrid grid(sys, 2, 2, 1.0, QuadRule::trapezoid);
    CHECK(control_metric(grid, u, u_static) ==
          doctest::Approx(0.5).epsilon(1e-14));
  }
  const SpaceTimeGrid grid(sys, 2, 2, 1.0);
  CHECK_THROWS_AS(control_metric(grid, BoundaryControl(3), u_static),
                  ShapeMismatch);
}

TEST_CASE("state metric hand value") {
  const SystemSpec sys = shift_system(1.0);
  StateTrajectory state(2, 2);
  for (int n = 0; n <= 2; ++n)
    for (int i = 0; i <= 2; ++i) state.plus(n, i) = n;
  const StaticProfile zero(2);
  {
    const SpaceTimeGrid grid(sys, 2, 2, 1.0, QuadRule::rectangle);
    CHECK(state_metric(grid, state, zero) ==
          doctest::Approx(0.5).epsilon(1e-14));
  }
  {
    const SpaceTimeGrid grid(sys, 2, 2, 1.0, QuadRule::trapezoid);
    CHECK(state_metric(grid, state, zero) ==
          doctest::Approx(1.5).epsilon(1e-14));
  }
  const SpaceTimeGrid grid(sys, 2, 2, 1.0);
  CHECK_THROWS_AS(state_metric(grid, StateTrajectory(3, 2), zero),
                  ShapeMismatch);
  CHECK_THROWS_AS(state_metric(grid, state, StaticProfile(5)), ShapeMismatch);
}

TEST_CASE("closed-form reference for constant diagonal coupling") {
  Eigen::Matrix2d M;
  M << 1.0, 0.0, 0.0, 2.0;
  const SystemSpec sys = make_constant_system(2.0, -1.0, M, -0.5, 1.0);
  const double lambda = 0.25;
  const Eigen::Vector2d R_b(2.0, -1.0);
  const DecoupledOracle o = decoupled_oracle(sys, lambda, R_b, 5.0);

  // exp(-1/4) and exp(-1), the per-channel steady gains.
  CHECK(o.gain[0] == doctest::Approx(0.7788007830714049).epsilon(1e-12));
  CHECK(o.gain[1] == doctest::Approx(0.36787944117144233).epsilon(1e-12));
  for (int k = 0; k < 2; ++k) {
    const double a = o.gain[k];
    const double want =
        (1.0 - lambda) * a * R_b[k] / (lambda + (1.0 - lambda) * a * a);
    CHECK(o.u_static[k] == doctest::Approx(want).epsilon(1e-12));
  }
  CHECK(o.t_switch_plus == doctest::Approx(4.5).epsilon(1e-14));
  CHECK(o.t_switch_minus == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(o.metric_times_T ==
        doctest::Approx(0.5 * o.u_static[0] * o.u_static[0] +
                        1.0 * o.u_static[1] * o.u_static[1])
            .epsilon(1e-12));

  Eigen::Matrix2d swap;
  swap << 0.0, 1.0, 1.0, 0.0;
  const SystemSpec coupled = make_constant_system(1.0, -1.0, swap, -0.5, 1.0);
  CHECK_THROWS_AS(decoupled_oracle(coupled, 0.5, R_b, 5.0), NotDiagonal);
  CHECK_THROWS_AS(decoupled_oracle(sys, 1.0, R_b, 5.0), LambdaOutOfRange);
}

TEST_CASE("log-log slope fit") {
  const std::vector<double> x = {1.0, 2.0, 4.0, 8.0};
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = 3.0 * std::pow(x[i], -2.0);
  const auto slope = fit_log_slope(x, y);
  REQUIRE(slope.has_value());
  CHECK(*slope == doctest::Approx(-2.0).epsilon(1e-12));

  CHECK_FALSE(fit_log_slope(x, {1.0, 1.0}).has_value());
  CHECK_FALSE(fit_log_slope(x, {1.0, 1.0, 0.0, 1.0}).has_value());
  CHECK_FALSE(fit_log_slope({1.0}, {1.0}).has_value());
}

TEST_CASE("horizon sweep shows the averaged-distance decay") {
  SweepProblem problem;
  problem.sys = example_system();
  problem.cost = cost_from_tracking(0.5, Eigen::Vector2d(1.0, 1.0));
  problem.n_x = 32;
  problem.cfl = 1.0;
  problem.rule = QuadRule::rectangle;
  problem.cg.tol = 1e-10;
  const std::vector<double> horizons = {5.0, 10.0, 20.0, 40.0};
  const TurnpikeReport report = sweep_and_fit(problem, horizons);

  REQUIRE(report.control_metrics.size() == horizons.size());
  REQUIRE(report.fitted_exponent.has_value());
  CHECK(*report.fitted_exponent >= -1.15);
  CHECK(*report.fitted_exponent <= -0.85);

  // State deviation and static-control gradient both saturate: compare the
  // two longest horizons.
  const std::size_t last = horizons.size() - 1;
  const double state_ratio =
      std::max(report.state_metrics[last], report.state_metrics[last - 1]) /
      std::min(report.state_metrics[last], report.state_metrics[last - 1]);
  CHECK(state_ratio <= 1.1);
  const double grad_ratio =
      std::max(report.grad_norms[last], report.grad_norms[last - 1]) /
      std::min(report.grad_norms[last], report.grad_norms[last - 1]);
  CHECK(grad_ratio <= 1.1);

  REQUIRE(report.kappas.size() == horizons.size());
  double k_min = report.kappas[0];
  for (double k : report.kappas) {
    CHECK(k >= 1.0 - 1e-6);  // exact floor 2*lambda = 1, estimated from above
    CHECK(k <= 1.5);
    k_min = std::min(k_min, k);
  }
  CHECK(report.kappa == k_min);

  CHECK_THROWS_AS(sweep_and_fit(problem, {}), EmptyGrid);
  CHECK_THROWS_AS(sweep_and_fit(problem, {5.0, 5.0}), ValidationError);
}

TEST_CASE("weighted energy of a free wave decays at the certified rate") {
  const SystemSpec sys = shift_system(2.5);
  const SpaceTimeGrid grid(sys, 250, 200, 2.0, QuadRule::rectangle);
  const StaticProfile h0 = bump_profile(grid);
  const StateTrajectory state =
      forward_solve(sys, grid, BoundaryControl(grid.n_t()), &h0);

  const ExpWeight weight{0.5, 0.5, WeightRegime::decay};
  const Certificate cert = certify_decay(sys, weight);
  REQUIRE(cert.valid);
  CHECK(cert.bound == doctest::Approx(-0.5).epsilon(1e-12));

  // The bump travels one cell per step, so the weighted energy is exactly
  // E(0) exp(-mu t) at every node.
  const EnergySeries inst =
      lyapunov_energy(grid, state, weight, EnergyKind::state_deviation);
  REQUIRE(inst.fitted_rate.has_value());
  CHECK(*inst.fitted_rate == doctest::Approx(-0.5).epsilon(1e-6));
  const DecayVerdict v1 = decay_check(inst, cert);
  CHECK(v1.applicable);
  CHECK(v1.pass);
  CHECK(v1.worst_margin <= 0.0);

  const EnergySeries window =
      lyapunov_energy(grid, state, weight, EnergyKind::sliding_window);
  REQUIRE(window.fitted_rate.has_value());
  CHECK(*window.fitted_rate == doctest::Approx(-0.5).epsilon(1e-6));
  CHECK(decay_check(window, cert).pass);

  // Regime guards: state energies need decay weights, adjoint energies growth
  // weights.
  const ExpWeight growth{-0.5, -0.5, WeightRegime::growth};
  CHECK_THROWS_AS(
      lyapunov_energy(grid, state, growth, EnergyKind::state_deviation),
      RegimeMismatch);
  CHECK_THROWS_AS(
      lyapunov_energy(grid, state, weight, EnergyKind::adjoint_deviation),
      RegimeMismatch);
  const EnergySeries adj =
      lyapunov_energy(grid, state, growth, EnergyKind::adjoint_deviation);
  REQUIRE(adj.values.size() == static_cast<std::size_t>(grid.n_t()) + 1);
  for (double v : adj.values) CHECK(v >= 0.0);

  CHECK_THROWS_AS(lyapunov_energy(grid, StateTrajectory(3, 3), weight,
                                  EnergyKind::state_deviation),
                  ShapeMismatch);
}

TEST_CASE("decay check rejects growth and invalid certificates") {
  EnergySeries series;
  series.times = {0.0, 1.0};
  series.values = {1.0, 2.0};
  Certificate cert;
  cert.valid = true;
  cert.bound = -0.5;
  const DecayVerdict bad = decay_check(series, cert);
  CHECK(bad.applicable);
  CHECK_FALSE(bad.pass);
  CHECK(bad.worst_margin > 0.0);

  cert.valid = false;
  const DecayVerdict na = decay_check(series, cert);
  CHECK_FALSE(na.applicable);
  CHECK_FALSE(na.pass);

  cert.valid = true;
  EnergySeries zero;
  zero.times = {0.0, 1.0};
  zero.values = {0.0, 0.0};
  const DecayVerdict trivially = decay_check(zero, cert);
  CHECK(trivially.applicable);
  CHECK(trivially.pass);
}

TEST_SUITE_END();
