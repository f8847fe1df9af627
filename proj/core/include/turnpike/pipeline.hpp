#pragma once

#include <Eigen/Core>
#include <vector>

#include "turnpike/turnpike_metrics.hpp"

namespace turnpike {

// Isothermal gas pipeline with friction and slope:
//   rho_t + q_x = 0,
//   q_t + c^2 rho_x = -theta q|q|/rho - g h' rho.
struct PipelineParams {
  double theta = 0.05;     // friction, 1/m
  double g = 9.81;         // gravity, m/s^2
  double h_prime = 0.025;  // constant slope
  double c = 340.0;        // sound speed, m/s
  double length = 10000.0; // m
  double T = 600.0;        // horizon, s
  double rho_exit_initial = 35.0;  // rho(L) of the initial stationary state
  double q_exit_initial = 400.0;   // mass flux (constant in x when steady)
  double rho_exit_target = 40.0;
  double q_exit_target = 400.0;
  double alpha = 0.01;   // exit flux weight
  double beta = 0.01;    // entry flux weight
  double lambda = 0.1111;
  bool literal_entry_cost = false;  // penalize absolute entry values via c0

  bool operator==(const PipelineParams&) const = default;
};

// Stationary state: constant flux q_bar and the density profile of
//   c^2 rho_x = -theta q|q|/rho - g h' rho
// integrated backward from x = L with classical 4-stage steps.
struct StationaryState {
  double q_bar = 0.0;
  std::vector<double> x;        // solver nodes
  std::vector<double> rho_bar;  // density at the nodes
  std::vector<Eigen::Vector2d> R_bar;  // diagonal variables at the nodes
};

StationaryState stationary_profile(const PipelineParams& params, int n_x,
                                   int substeps_per_cell = 10);

// Diagonal variables R = (c rho + q, -c rho + q) and their inverse.  The
// inverse requires R+ - R- > 0 (positive density).
Eigen::Vector2d to_diagonal(double rho, double q, double c);
void from_diagonal(const Eigen::Vector2d& R, double c, double& rho, double& q);

// Source term of the diagonal nonlinear system and its Jacobian:
//   F(R) = -[ theta c (R+ + R-)|R+ + R-| / (2(R+ - R-)) + g h'(R+ - R-)/(2c) ] (1,1)^T.
Eigen::Vector2d pipeline_source(const PipelineParams& params,
                                const Eigen::Vector2d& R);
Eigen::Matrix2d pipeline_source_jacobian(const PipelineParams& params,
                                         const Eigen::Vector2d& R);

// Linearization about the stationary state: d+ = c, d- = -c, eta0 = -1 and
// M(x) = -dF(R_bar(x)) interpolated between the nodes.
SystemSpec linearized_system(const PipelineParams& params,
                             const StationaryState& stationary);

// Time stepper used by the transition scenario: explicit in time, one-sided
// against the wind at the NEW time level in space,
//   (1 + a_i) r+^{n+1,i} = r+^{n,i} + a_i r+^{n+1,i-1} + dt eta0 (M(x_i) r^{n,i})_+,
// a_i = d+(x_i) dt/dx, mirrored for r-, with the same boundary injections as
// forward_solve.  The fully explicit march amplifies the grid-scale mode by
// |1 + dt lambda| per step for every eigenvalue lambda of eta0 M, which
// compounds to exp(|lambda| T) over the horizon whenever the coupling damps
// a cross-channel mode -- fatal at transition-scenario scale.  The implicit
// sweep damps that mode for any Courant number and has the same steady
// states, so static/dynamic comparisons are unaffected.
StateTrajectory implicit_forward_solve(const SystemSpec& sys,
                                       const SpaceTimeGrid& grid,
                                       const BoundaryControl& u,
                                       const StaticProfile* h0 = nullptr);

// H-adjoint of the control -> outflow-trace map of implicit_forward_solve
// (exact discrete transpose, weighted like boundary_to_trace_adjoint).
BoundaryControl implicit_trace_adjoint(const SystemSpec& sys,
                                       const SpaceTimeGrid& grid,
                                       const TraceSignal& z);

// Quadratic cost of the transition in deviation variables.  Exit tracking
//   |rho(t,L) - rho_T|^2 + alpha |q(t,L) - q_T|^2
// with rho(t,L) = rho_bar(L) + (trace+ - u-)/(2c), q(t,L) = q_bar + (trace+ + u-)/2;
// entry penalty lambda (rho_dev(t,0)^2 + beta q_dev(t,0)^2) measured against
// the initial stationary state (or literal absolute values when
// literal_entry_cost is set).
QuadraticCost build_pipeline_cost(const PipelineParams& params,
                                  const StationaryState& stationary);

struct ScenarioReport {
  StationaryState stationary;
  StaticSolution static_sol;
  DynamicSolution dynamic_sol;
  double cfl = 0.0;
  // Physical entry values of the dynamic run and the static optimum.
  std::vector<double> times;        // n_t + 1 nodes
  std::vector<double> rho_entry, q_entry;
  double rho_entry_static = 0.0, q_entry_static = 0.0;
  std::vector<double> e_rho, e_q;   // relative entry errors vs. the static optimum
  // Longest contiguous window with max(e_rho, e_q) below the plateau tolerance.
  double plateau_fraction = 0.0;
  int plateau_begin = 0, plateau_end = 0;  // node range [begin, end)
  double plateau_tolerance = 1e-2;
};

// Full transition scenario: stationary profile, linearization, static and
// dynamic solves, physical reconstruction and plateau analysis.
ScenarioReport run_transition_scenario(const PipelineParams& params, int n_x,
                                       int n_t,
                                       QuadRule rule = QuadRule::trapezoid,
                                       const CgOptions& opts = {});

// Physical fields rho(t,x), q(t,x) reconstructed from a deviation trajectory.
void reconstruct_physical(const StationaryState& stationary, double c,
                          const StateTrajectory& deviation,
                          std::vector<double>& rho, std::vector<double>& q);

}  // namespace turnpike
