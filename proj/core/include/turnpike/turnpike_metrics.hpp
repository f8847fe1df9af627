#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "turnpike/optimizer.hpp"

namespace turnpike {

// (1/T) ||u - u_static||_H^2 for a constant static control.
double control_metric(const SpaceTimeGrid& grid, const BoundaryControl& u,
                      const Eigen::Vector2d& u_static);

// Space-time quadrature of ||r(t, x) - R(x)||^2 (no 1/T scaling).
double state_metric(const SpaceTimeGrid& grid, const StateTrajectory& state,
                    const StaticProfile& reference);

// Closed-form reference for constant-speed systems with diagonal coupling:
// each channel decouples, the steady gain is a = exp(eta0 m L / |d|), the
// optimal static control is (1 - lambda) a R_b / (lambda + (1 - lambda) a^2),
// and the optimal dynamic control holds that value until the last transit
// window, then switches off.
struct DecoupledOracle {
  Eigen::Vector2d gain;           // (a+, a-)
  Eigen::Vector2d u_static;
  double t_switch_plus = 0.0;     // T - L/d+
  double t_switch_minus = 0.0;    // T - L/|d-|
  double metric_times_T = 0.0;    // (L/d+) u+^2 + (L/|d-|) u-^2
};
DecoupledOracle decoupled_oracle(const SystemSpec& sys, double lambda,
                                 const Eigen::Vector2d& R_b, double T);

struct SweepProblem {
  SystemSpec sys;
  QuadraticCost cost;
  int n_x = 64;
  double cfl = 1.0;
  QuadRule rule = QuadRule::rectangle;
  CgOptions cg;
  bool estimate_kappa = true;
};

struct TurnpikeReport {
  std::vector<double> horizons;         // strictly increasing
  std::vector<double> control_metrics;
  std::vector<double> state_metrics;
  std::vector<double> grad_norms;       // ||grad J(u_static const)||_H per T
  std::vector<double> kappas;           // per-horizon coercivity estimates
  std::optional<double> fitted_exponent;  // log-log LS slope of control_metric
  double kappa = 0.0;                     // min over the sweep
};

// Solves static + dynamic problems across the horizon list (fixed spatial
// grid, n_t chosen to keep the Courant number) and fits the decay exponent.
TurnpikeReport sweep_and_fit(const SweepProblem& problem,
                             const std::vector<double>& horizons);

// Least-squares slope of log(y) against log(x); empty when any y <= 0.
std::optional<double> fit_log_slope(const std::vector<double>& x,
                                    const std::vector<double>& y);

// Weighted energies 1/2 integral (r - ref)^T E(x) (r - ref) dx per time node.
//   sliding_window: additionally integrated over a window min(1, T) in time
//                   (decay weights, mu > 0);
//   adjoint_deviation: growth weights (mu < 0);
//   state_deviation: decay weights (mu > 0).
enum class EnergyKind { sliding_window, adjoint_deviation, state_deviation };

struct EnergySeries {
  std::vector<double> times;
  std::vector<double> values;
  std::optional<double> fitted_rate;  // log-slope over the middle 60% of decay
};

EnergySeries lyapunov_energy(const SpaceTimeGrid& grid,
                             const StateTrajectory& state,
                             const ExpWeight& weight, EnergyKind kind,
                             const StaticProfile* reference = nullptr);

// Pointwise check E(t) <= E(t0) exp(bound (t - t0)) (1 + tol) on [t0, T].
struct DecayVerdict {
  bool pass = false;
  bool applicable = false;  // requires a valid certificate
  double worst_margin = 0.0;  // max of E(t)/bound-envelope - 1
};

DecayVerdict decay_check(const EnergySeries& series, const Certificate& cert,
                         double t0 = 0.0, double tol = 1e-3);

}  // namespace turnpike
